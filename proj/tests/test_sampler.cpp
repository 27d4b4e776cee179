#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "tmpcl/sampler.hpp"

using tmp::PseudoLabeling;
using tmp::Rng;
using tmp::SamplerConfig;
using tmp::ViewConfig;

namespace {

PseudoLabeling make_labeling(const std::vector<int>& labels) {
  PseudoLabeling out;
  out.labels = labels;
  out.num_classes = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> sizes(out.num_classes, 0);
  for (int c : labels) ++sizes[c];
  out.is_singleton.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.is_singleton[i] = sizes[labels[i]] == 1;
  }
  return out;
}

}  // namespace

TEST_CASE("pk batches hold P distinct classes of K instances each") {
  // 80 classes of size 8: every full batch is 16 classes x 4.
  std::vector<int> labels;
  for (int c = 0; c < 80; ++c) {
    for (int t = 0; t < 8; ++t) labels.push_back(c);
  }
  const PseudoLabeling labeling = make_labeling(labels);
  SamplerConfig cfg;
  cfg.batch_size = 64;
  cfg.k = 4;
  Rng rng(1);
  const auto batches = pk_sample_epoch(labeling, cfg, rng);
  REQUIRE(batches.size() == 5);  // 80 classes * 4 / 64
  for (const auto& batch : batches) {
    CHECK(batch.size() == 64);
    std::map<int, int> counts;
    std::set<int> distinct;
    for (int idx : batch) {
      ++counts[labels[idx]];
      distinct.insert(idx);
    }
    CHECK(counts.size() == 16);
    CHECK(distinct.size() == 64);  // classes of size >= K sample w/o replacement
    for (const auto& [cls, cnt] : counts) CHECK(cnt == 4);
  }
}

TEST_CASE("all-singleton labeling degenerates to sampling w/o replacement") {
  std::vector<int> labels(20);
  std::iota(labels.begin(), labels.end(), 0);
  const PseudoLabeling labeling = make_labeling(labels);
  SamplerConfig cfg;
  cfg.batch_size = 8;
  cfg.k = 4;
  Rng rng(2);
  const auto batches = pk_sample_epoch(labeling, cfg, rng);
  std::set<int> seen;
  std::size_t total = 0;
  for (const auto& batch : batches) {
    total += batch.size();
    seen.insert(batch.begin(), batch.end());
  }
  CHECK(total == 20);
  CHECK(seen.size() == 20);
}

TEST_CASE("pk class-count property over 100 seeded epochs") {
  // Mix of singletons and classes of size >= K; counts per batch must be
  // 1 (singleton) or K, except at most one truncated group per batch.
  std::vector<int> labels;
  int next = 0;
  for (int c = 0; c < 12; ++c) {
    for (int t = 0; t < 6; ++t) labels.push_back(next);
    ++next;
  }
  for (int s = 0; s < 9; ++s) labels.push_back(next++);
  const PseudoLabeling labeling = make_labeling(labels);

  SamplerConfig cfg;
  cfg.batch_size = 16;
  cfg.k = 4;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    std::set<int> classes_seen;
    for (const auto& batch : pk_sample_epoch(labeling, cfg, rng)) {
      std::map<int, int> counts;
      for (int idx : batch) ++counts[labels[idx]];
      int truncated = 0;
      for (const auto& [cls, cnt] : counts) {
        // Epoch visits each class exactly once.
        CHECK(classes_seen.count(cls) == 0);
        classes_seen.insert(cls);
        if (labeling.is_singleton[std::find(labels.begin(), labels.end(), cls) -
                                  labels.begin()]) {
          CHECK(cnt == 1);
        } else if (cnt != cfg.k) {
          CHECK(cnt < cfg.k);
          ++truncated;
        }
      }
      CHECK(truncated <= 1);
    }
    CHECK(classes_seen.size() == static_cast<std::size_t>(labeling.num_classes));
  }
}

TEST_CASE("pk sampler validates N and K") {
  const PseudoLabeling labeling = make_labeling({0, 0, 1, 1});
  SamplerConfig cfg;
  cfg.batch_size = 2;
  cfg.k = 4;
  Rng rng(3);
  CHECK_THROWS_AS(pk_sample_epoch(labeling, cfg, rng), std::invalid_argument);
}

TEST_CASE("random sampler chunks a permutation") {
  Rng rng(4);
  const auto batches = tmp::random_sample_epoch(10, 4, rng);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 4);
  CHECK(batches[1].size() == 4);
  CHECK(batches[2].size() == 2);
  std::set<int> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());
  CHECK(seen.size() == 10);

  Rng r1(5), r2(5);
  CHECK(tmp::random_sample_epoch(10, 4, r1) ==
        tmp::random_sample_epoch(10, 4, r2));
}

TEST_CASE("identity augmentation returns the raw features twice") {
  Rng rng(6);
  Eigen::MatrixXd raw(3, 4);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) raw(i, j) = i + 0.1 * j;
  }
  ViewConfig cfg;
  cfg.noise_std = 0.0;
  cfg.mask_prob = 0.0;
  cfg.scale_jitter = 0.0;
  const auto views = make_views(raw, cfg, rng);
  REQUIRE(views.inputs.rows() == 6);
  for (int t = 0; t < 3; ++t) {
    CHECK((views.inputs.row(2 * t) - raw.row(t)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((views.inputs.row(2 * t + 1) - raw.row(t)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(views.pair_of[2 * t] == 2 * t + 1);
    CHECK(views.pair_of[2 * t + 1] == 2 * t);
  }
}

TEST_CASE("full masking zeroes every view") {
  Rng rng(7);
  Eigen::MatrixXd raw = Eigen::MatrixXd::Constant(2, 5, 3.0);
  ViewConfig cfg;
  cfg.noise_std = 0.0;
  cfg.mask_prob = 1.0;
  cfg.scale_jitter = 0.0;
  const auto views = make_views(raw, cfg, rng);
  CHECK(views.inputs.isZero(0.0));
}

TEST_CASE("noise-only views are centered on the raw features") {
  Rng rng(8);
  Eigen::MatrixXd raw = Eigen::MatrixXd::Constant(1, 1, 2.5);
  ViewConfig cfg;
  cfg.noise_std = 0.05;
  cfg.mask_prob = 0.0;
  cfg.scale_jitter = 0.0;
  const int draws = 100000;
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) {
    const auto views = make_views(raw, cfg, rng);
    sum += (views.inputs(0, 0) - 2.5) + (views.inputs(1, 0) - 2.5);
  }
  const double mean = sum / (2 * draws);
  // 3 sigma band for the mean of 2*draws N(0, 0.05) samples.
  const double band = 3.0 * 0.05 / std::sqrt(2.0 * draws);
  CHECK(std::abs(mean) <= band);
}
