#include "tmpcl/sampler.hpp"

#include <numeric>
#include <stdexcept>

namespace tmp {

std::vector<std::vector<int>> pk_sample_epoch(const PseudoLabeling& labeling,
                                              const SamplerConfig& cfg,
                                              Rng& rng) {
  if (cfg.batch_size < cfg.k) {
    throw std::invalid_argument("pk_sample_epoch: batch_size < K");
  }
  if (cfg.batch_size % cfg.k != 0) {
    throw std::invalid_argument("pk_sample_epoch: K must divide batch_size");
  }

  std::vector<std::vector<int>> members(labeling.num_classes);
  for (std::size_t i = 0; i < labeling.labels.size(); ++i) {
    members[labeling.labels[i]].push_back(static_cast<int>(i));
  }

  std::vector<int> class_order(labeling.num_classes);
  std::iota(class_order.begin(), class_order.end(), 0);
  rng.shuffle(class_order);

  std::vector<std::vector<int>> batches;
  std::vector<int> current;
  current.reserve(cfg.batch_size);
  for (int c : class_order) {
    const auto& pool = members[c];
    std::vector<int> group;
    if (pool.size() == 1) {
      group.push_back(pool[0]);
    } else if (pool.size() >= static_cast<std::size_t>(cfg.k)) {
      // k distinct members, partial Fisher-Yates.
      std::vector<int> shuffled = pool;
      for (int t = 0; t < cfg.k; ++t) {
        const std::size_t pick =
            t + rng.uniform_index(shuffled.size() - static_cast<std::size_t>(t));
        std::swap(shuffled[t], shuffled[pick]);
        group.push_back(shuffled[t]);
      }
    } else {
      // 1 < size < k: sample with replacement up to k.
      for (int t = 0; t < cfg.k; ++t) {
        group.push_back(pool[rng.uniform_index(pool.size())]);
      }
    }
    for (int idx : group) {
      current.push_back(idx);
      if (static_cast<int>(current.size()) == cfg.batch_size) {
        batches.push_back(std::move(current));
        current.clear();
        break;  // truncate the group at the batch boundary
      }
    }
  }
  if (!current.empty()) batches.push_back(std::move(current));
  return batches;
}

std::vector<std::vector<int>> random_sample_epoch(int n, int batch_size,
                                                  Rng& rng) {
  if (n <= 0 || batch_size <= 0) {
    throw std::invalid_argument("random_sample_epoch: positive sizes required");
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<std::vector<int>> batches;
  for (int start = 0; start < n; start += batch_size) {
    const int end = std::min(n, start + batch_size);
    batches.emplace_back(perm.begin() + start, perm.begin() + end);
  }
  return batches;
}

Views make_views(const Eigen::MatrixXd& raw_features, const ViewConfig& cfg,
                 Rng& rng) {
  const int b = static_cast<int>(raw_features.rows());
  if (b == 0) throw std::invalid_argument("make_views: empty batch");
  const int d = static_cast<int>(raw_features.cols());

  Views out;
  out.inputs.resize(2 * b, d);
  out.pair_of.resize(2 * b);
  for (int t = 0; t < b; ++t) {
    for (int v = 0; v < 2; ++v) {
      const int row = 2 * t + v;
      const double scale = 1.0 + rng.uniform(-1.0, 1.0) * cfg.scale_jitter;
      for (int j = 0; j < d; ++j) {
        double x = raw_features(t, j) * scale;
        if (cfg.mask_prob > 0.0 && rng.uniform() < cfg.mask_prob) x = 0.0;
        if (cfg.noise_std > 0.0) x += rng.normal() * cfg.noise_std;
        out.inputs(row, j) = x;
      }
    }
    out.pair_of[2 * t] = 2 * t + 1;
    out.pair_of[2 * t + 1] = 2 * t;
  }
  return out;
}

}  // namespace tmp
