// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tmpcl/config.hpp"
#include "tmpcl/dataset.hpp"
#include "tmpcl/encoder.hpp"
#include "tmpcl/eval.hpp"
#include "tmpcl/labelgen.hpp"
#include "tmpcl/loss.hpp"
#include "tmpcl/pipeline.hpp"
#include "tmpcl/sampler.hpp"

namespace fs = std::filesystem;
using tmp::Rng;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, bool ok,
               const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << number << ": "
            << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

tmp::ViewBatch random_batch(int num_samples, int dim, int num_labels,
                            Rng& rng) {
  tmp::ViewBatch batch;
  const int m = 2 * num_samples;
  batch.embeddings = random_matrix(m, dim, rng);
  batch.origin.resize(m);
  batch.labels.resize(m);
  batch.pair_of.resize(m);
  for (int t = 0; t < num_samples; ++t) {
    const int label = static_cast<int>(rng.uniform_index(num_labels));
    batch.origin[2 * t] = batch.origin[2 * t + 1] = t;
    batch.labels[2 * t] = batch.labels[2 * t + 1] = label;
    batch.pair_of[2 * t] = 2 * t + 1;
    batch.pair_of[2 * t + 1] = 2 * t;
  }
  return batch;
}

bool grad_close(double analytic, double fd, double tol) {
  const double scale =
      std::max(1.0, std::max(std::abs(analytic), std::abs(fd)));
  return std::abs(analytic - fd) <= tol * scale;
}

// --- criterion 1: gradient correctness --------------------------------

void check_gradients() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  const double taus[] = {0.05, 0.1, 0.5};
  Rng rng(1001);
  int batches = 0;
  for (tmp::LossMode mode :
       {tmp::LossMode::kTmp, tmp::LossMode::kScl, tmp::LossMode::kInstance}) {
    for (int trial = 0; trial < 34 && ok; ++trial) {
      const int num_samples = 2 + static_cast<int>(rng.uniform_index(15));
      const int dim = 2 + static_cast<int>(rng.uniform_index(15));
      const int num_labels = 1 + static_cast<int>(rng.uniform_index(num_samples));
      tmp::ViewBatch batch = random_batch(num_samples, dim, num_labels, rng);
      tmp::LossConfig cfg;
      cfg.mode = mode;
      cfg.temperature = taus[trial % 3];
      const Eigen::MatrixXd analytic = contrastive_loss(batch, cfg).grad;
      for (Eigen::Index i = 0; i < batch.embeddings.rows() && ok; ++i) {
        for (Eigen::Index j = 0; j < batch.embeddings.cols() && ok; ++j) {
          const double fd = oracle::central_difference(
              batch.embeddings(i, j),
              [&]() { return contrastive_loss(batch, cfg).value; });
          ok = grad_close(analytic(i, j), fd, 1e-4);
        }
      }
      ++batches;
    }
  }

  // Encoder parameter gradients through the TMP loss.
  for (std::uint64_t seed = 0; seed < 5 && ok; ++seed) {
    Rng nrng(seed + 77);
    tmp::EncoderParams params = tmp::make_mlp({6, 8, 4}, nrng);
    const Eigen::MatrixXd inputs = random_matrix(12, 6, nrng);
    tmp::ViewBatch batch = random_batch(6, 4, 3, nrng);
    auto loss_value = [&]() {
      batch.embeddings = forward(params, inputs);
      return contrastive_loss(batch, tmp::LossConfig{}).value;
    };
    tmp::ForwardCache cache;
    batch.embeddings = forward(params, inputs, &cache);
    const auto loss = contrastive_loss(batch, tmp::LossConfig{});
    const auto grads = backward(params, cache, loss.grad);
    for (std::size_t l = 0; l < params.layers.size() && ok; ++l) {
      auto& layer = params.layers[l];
      for (Eigen::Index i = 0; i < layer.weight.rows() && ok; ++i) {
        for (Eigen::Index j = 0; j < layer.weight.cols() && ok; ++j) {
          const double fd =
              oracle::central_difference(layer.weight(i, j), loss_value);
          ok = grad_close(grads.weight[l](i, j), fd, 1e-4);
        }
      }
      for (Eigen::Index i = 0; i < layer.bias.size() && ok; ++i) {
        const double fd = oracle::central_difference(layer.bias[i], loss_value);
        ok = grad_close(grads.bias[l][i], fd, 1e-4);
      }
    }
  }

  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  std::ostringstream detail;
  detail << batches << " batches, " << elapsed << "s";
  criterion(1, "analytic gradients match finite differences",
            ok && elapsed < 60.0, detail.str());
}

// --- criterion 2: degenerate equivalences -----------------------------

void check_equivalences() {
  Rng rng(2002);
  bool nt_ok = true, scl_eq_ok = true, scl_gt_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    // (a) all-distinct labels equal NT-Xent.
    tmp::ViewBatch batch = random_batch(8, 6, 1, rng);
    for (int t = 0; t < 8; ++t) batch.labels[2 * t] = batch.labels[2 * t + 1] = t;
    tmp::LossConfig cfg;
    const double got = contrastive_loss(batch, cfg).value;
    const double want = oracle::nt_xent(batch.embeddings, batch.pair_of, 0.05);
    nt_ok = nt_ok && std::abs(got - want) <= 1e-9;

    // (b) one image per class: TMP equals SCL.
    tmp::LossConfig scl;
    scl.mode = tmp::LossMode::kScl;
    scl_eq_ok = scl_eq_ok &&
                std::abs(got - contrastive_loss(batch, scl).value) <= 1e-12;

    // (c) a class with two images: SCL strictly larger.
    tmp::ViewBatch shared = random_batch(6, 6, 1, rng);
    const std::vector<int> labels = {0, 0, 1, 2, 3, 4};
    for (int t = 0; t < 6; ++t) {
      shared.labels[2 * t] = shared.labels[2 * t + 1] = labels[t];
    }
    scl_gt_ok = scl_gt_ok && contrastive_loss(shared, scl).value >
                                 contrastive_loss(shared, cfg).value;
  }
  criterion(2, "TMP/NT-Xent, TMP/SCL degenerate equivalences",
            nt_ok && scl_eq_ok && scl_gt_ok);
}

// --- criterion 3: clustering oracles ----------------------------------

void check_clustering() {
  Rng rng(3003);
  bool dbscan_ok = true;
  for (int trial = 0; trial < 200 && dbscan_ok; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform_index(46));
    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) dist(i, j) = dist(j, i) = rng.uniform();
      dist(i, i) = 0.0;
    }
    tmp::ClusterConfig cfg;
    cfg.epsilon = 0.05 + 0.3 * rng.uniform();
    cfg.min_samples = 2 + static_cast<int>(rng.uniform_index(3));
    dbscan_ok = tmp::dbscan(dist, cfg) ==
                oracle::dbscan_reference(dist, cfg.epsilon, cfg.min_samples);
  }

  const Eigen::MatrixXd points = random_matrix(40, 8, rng);
  const double jaccard_err =
      (tmp::jaccard_distance(points, 10, 4) -
       oracle::jaccard_reference(points, 10, 4))
          .cwiseAbs()
          .maxCoeff();
  criterion(3, "DBSCAN and Jaccard match brute-force oracles",
            dbscan_ok && jaccard_err <= 1e-10,
            "jaccard max err " + std::to_string(jaccard_err));
}

// --- criterion 4: evaluation oracle -----------------------------------

void check_evaluation() {
  Rng rng(4004);
  bool ok = true;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    const int n = 120;
    const Eigen::MatrixXd emb = random_matrix(n, 8, rng);
    tmp::EvalSplit split;
    split.identity.resize(n);
    split.camera.resize(n);
    std::vector<long long> ids(n);
    std::vector<unsigned> cams(n);
    for (int i = 0; i < n; ++i) {
      ids[i] = static_cast<long long>(rng.uniform_index(15));
      cams[i] = static_cast<unsigned>(rng.uniform_index(3));
      split.identity[i] = ids[i];
      split.camera[i] = cams[i];
    }
    for (int i = 0; i < 20; ++i) split.query.push_back(i);
    for (int i = 20; i < n; ++i) split.gallery.push_back(i);
    const auto got = tmp::evaluate(emb, split, 10);
    const auto want = oracle::evaluate_reference(emb, split.query,
                                                 split.gallery, ids, cams, 10);
    ok = got.num_evaluated == want.evaluated && got.map == want.map;
    for (int r = 0; r < 10 && ok; ++r) ok = got.cmc[r] == want.cmc[r];
  }
  const double hand = tmp::average_precision({true, false, true});
  ok = ok && std::abs(hand - (1.0 + 2.0 / 3.0) / 2.0) <= 1e-12;
  criterion(4, "mAP/CMC equal the brute-force evaluator", ok);
}

// --- criterion 5: epsilon trend ----------------------------------------

void check_epsilon_trend() {
  tmp::SynthConfig synth;
  synth.num_identities = 30;
  synth.samples_per_identity = 10;
  synth.dim = 32;
  synth.num_cameras = 4;
  synth.within_identity_noise = 0.25;
  synth.camera_offset_scale = 0.1;
  Rng rng(5005);
  const tmp::Dataset ds = generate_synthetic(synth, rng);

  const tmp::ClusterConfig base =
      tmp::ClusterConfig{}.scaled_down(static_cast<int>(ds.size()));
  const Eigen::MatrixXd dist =
      tmp::jaccard_distance(ds.features(), base.k1, base.k2);
  bool ok = true;
  int prev = std::numeric_limits<int>::max();
  std::ostringstream detail;
  for (double eps : {0.5, 0.55, 0.6, 0.65, 0.7, 0.75}) {
    tmp::ClusterConfig cfg = base;
    cfg.epsilon = eps;
    const int classes =
        tmp::assign_pseudo_labels(tmp::dbscan(dist, cfg)).num_classes;
    detail << classes << " ";
    ok = ok && classes <= prev;
    prev = classes;
  }
  criterion(5, "class count non-increasing over the epsilon grid", ok,
            "C = " + detail.str() + "over eps 0.5..0.75");
}

// --- criterion 6: sampler contract -------------------------------------

void check_sampler() {
  std::vector<int> labels;
  int next = 0;
  for (int c = 0; c < 20; ++c) {
    for (int t = 0; t < 7; ++t) labels.push_back(next);
    ++next;
  }
  for (int s = 0; s < 17; ++s) labels.push_back(next++);
  tmp::PseudoLabeling labeling;
  labeling.labels = labels;
  labeling.num_classes = next;
  std::vector<int> sizes(next, 0);
  for (int c : labels) ++sizes[c];
  labeling.is_singleton.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labeling.is_singleton[i] = sizes[labels[i]] == 1;
  }

  tmp::SamplerConfig cfg;
  cfg.batch_size = 32;
  cfg.k = 4;
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 100 && ok; ++seed) {
    Rng rng(seed);
    std::vector<char> used(next, 0);
    for (const auto& batch : pk_sample_epoch(labeling, cfg, rng)) {
      std::map<int, int> counts;
      for (int idx : batch) ++counts[labels[idx]];
      int truncated = 0;
      for (const auto& [cls, cnt] : counts) {
        if (used[cls]) ok = false;  // class reused within the epoch
        used[cls] = 1;
        if (sizes[cls] == 1) {
          if (cnt != 1) ok = false;  // K=1 rule for singletons
        } else if (cnt != cfg.k) {
          if (cnt > cfg.k) ok = false;
          ++truncated;  // only the batch-boundary group may fall short
        }
      }
      if (truncated > 1) ok = false;
    }
    for (char u : used) ok = ok && u;  // epoch covers every class
  }
  criterion(6, "PK batches respect P*K composition and the K=1 rule", ok);
}

// --- criteria 7/8: end-to-end trends -----------------------------------

// Calibrated benchmark: 50 ids x 20 samples, dim 64, 6 cameras. The camera
// offset (0.10) is the load-bearing choice: it gives instance
// discrimination a shortcut direction that amplifies camera structure and
// ruins its cross-camera retrieval, while the pseudo-label path learns
// camera invariance. Calibration run (data seed 42, train seed 17,
// 20 epochs, base_lr 0.01): TMP mAP 0.9973 with 42 final classes, INSTANCE
// mAP 0.4944, mAP spread over label intervals {1,2,4} = 0.0022.
tmp::Dataset benchmark_dataset() {
  tmp::SynthConfig synth;
  synth.num_identities = 50;
  synth.samples_per_identity = 20;
  synth.dim = 64;
  synth.num_cameras = 6;
  synth.within_identity_noise = 0.04;
  synth.camera_offset_scale = 0.10;
  Rng rng(42);
  return generate_synthetic(synth, rng);
}

tmp::TrainConfig benchmark_config() {
  tmp::TrainConfig cfg;
  cfg.epochs = 20;
  cfg.label_interval = 1;
  cfg.loss.temperature = 0.05;
  cfg.loss.mode = tmp::LossMode::kTmp;
  cfg.cluster.epsilon = 0.75;  // loose clustering
  cfg.sampler.batch_size = 256;
  cfg.sampler.k = 4;
  // The reference schedule's 0.1 assumes a deep backbone; at this scale the
  // summed-positive loss needs a smaller step to descend at all.
  cfg.optim.base_lr = 0.01;
  cfg.hidden = {128};
  cfg.embed_dim = 64;
  cfg.seed = 17;
  return cfg;
}

double final_map(const tmp::Dataset& ds, const tmp::TrainConfig& cfg,
                 int* final_classes = nullptr) {
  const auto result = run_training(ds, cfg);
  if (final_classes) *final_classes = result.log.epochs.back().num_classes;
  const auto split = tmp::make_identity_split(ds, 0.25);
  return tmp::evaluate(embed_dataset(result.params, ds), split, 10).map;
}

void check_end_to_end() {
  const auto start = std::chrono::steady_clock::now();
  const tmp::Dataset ds = benchmark_dataset();

  int classes = 0;
  const double tmp_map = final_map(ds, benchmark_config(), &classes);

  tmp::TrainConfig instance_cfg = benchmark_config();
  instance_cfg.loss.mode = tmp::LossMode::kInstance;
  const double inst_map = final_map(ds, instance_cfg);

  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  std::ostringstream detail;
  detail << "tmp mAP " << tmp_map << ", instance mAP " << inst_map << ", C "
         << classes << ", " << elapsed << "s";
  criterion(7,
            "TMP reaches mAP >= 0.85 with C in [40,75]; INSTANCE >= 0.15 lower",
            tmp_map >= 0.85 && classes >= 40 && classes <= 75 &&
                inst_map <= tmp_map - 0.15 && elapsed < 300.0,
            detail.str());
}

void check_label_interval_stability() {
  const tmp::Dataset ds = benchmark_dataset();
  double lo = 1.0, hi = 0.0;
  std::ostringstream detail;
  for (int interval : {1, 2, 4}) {
    tmp::TrainConfig cfg = benchmark_config();
    cfg.label_interval = interval;
    const double map = final_map(ds, cfg);
    detail << "E=" << interval << " mAP " << map << "  ";
    lo = std::min(lo, map);
    hi = std::max(hi, map);
  }
  criterion(8, "label-interval sweep mAP spread <= 0.05", hi - lo <= 0.05,
            detail.str());
}

// --- criterion 9: byte-identical CLI outputs ---------------------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_cli_determinism() {
  const std::string cli = TMPCL_CLI_PATH;
  const fs::path dir = fs::temp_directory_path() / "tmpcl_acceptance";
  fs::create_directories(dir);
  auto run = [&](const std::string& args) {
    return std::system((cli + " " + args + " > /dev/null 2>&1").c_str()) == 0;
  };

  bool ok = true;
  const std::string ds = (dir / "ds.tmpd").string();
  for (const char* name : {"a", "b"}) {
    ok = ok && run("gen-data --ids 10 --per-id 10 --dim 16 --cameras 3 "
                   "--seed 11 --out " +
                   (dir / (std::string(name) + ".tmpd")).string());
  }
  ok = ok && slurp(dir / "a.tmpd") == slurp(dir / "b.tmpd");
  fs::copy_file(dir / "a.tmpd", ds, fs::copy_options::overwrite_existing);

  const std::string train_args =
      "train --data " + ds +
      " --epochs 2 --batch 20 --set hidden=16 --set embed_dim=8 --seed 3 "
      "--eval-every 1";
  for (const char* name : {"log_a.csv", "log_b.csv"}) {
    ok = ok && run(train_args + " --out-log " + (dir / name).string() +
                   " --out-ckpt " + (dir / "ck.tmpw").string());
  }
  ok = ok && slurp(dir / "log_a.csv") == slurp(dir / "log_b.csv");

  for (const char* name : {"rep_a.csv", "rep_b.csv"}) {
    ok = ok && run("eval --ckpt " + (dir / "ck.tmpw").string() + " --data " +
                   ds + " --out " + (dir / name).string());
  }
  ok = ok && slurp(dir / "rep_a.csv") == slurp(dir / "rep_b.csv");

  for (const char* name : {"sw_a.csv", "sw_b.csv"}) {
    ok = ok && run("sweep --data " + ds +
                   " --param tau --values 0.05,0.2 --epochs 1 --batch 20 "
                   "--set hidden=16 --set embed_dim=8 --seed 3 --out " +
                   (dir / name).string());
  }
  ok = ok && slurp(dir / "sw_a.csv") == slurp(dir / "sw_b.csv");

  criterion(9, "repeated CLI commands produce byte-identical outputs", ok);
}

}  // namespace

int main() {
  check_gradients();
  check_equivalences();
  check_clustering();
  check_evaluation();
  check_epsilon_trend();
  check_sampler();
  check_end_to_end();
  check_label_interval_stability();
  check_cli_determinism();
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(g_failures) +
                                      " CRITERIA FAILED")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
