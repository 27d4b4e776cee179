#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tmpcl/dataset.hpp"
#include "tmpcl/encoder.hpp"
#include "tmpcl/eval.hpp"
#include "tmpcl/labelgen.hpp"
#include "tmpcl/loss.hpp"
#include "tmpcl/sampler.hpp"

namespace tmp {

struct TrainConfig {
  int epochs = 100;
  int label_interval = 1;  // E: regenerate pseudo-labels every E epochs
  LossConfig loss;
  SamplerConfig sampler;
  ViewConfig views;
  LabelGenerator generator = LabelGenerator::kDbscan;
  ClusterConfig cluster;
  PulConfig pul;
  OptimConfig optim;
  std::vector<int> hidden = {128};
  int embed_dim = 64;
  std::uint64_t seed = 0;
  int eval_interval = 0;  // 0 = never; otherwise evaluate every this many epochs
  double query_fraction = 0.25;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  double lr = 0.0;
  int num_classes = 0;
  int num_singletons = 0;
  std::optional<double> map;
  std::optional<double> cmc1;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  EncoderParams params;
  TrainLog log;
};

// The alternating loop: regenerate pseudo-labels every label_interval
// epochs from un-augmented embeddings, then run contrastive updates over
// sampled batches. Ground-truth identities are never read by this path;
// the optional in-loop evaluation uses the dataset's identities only to
// report metrics.
TrainResult run_training(const Dataset& ds, const TrainConfig& cfg);

// Forward on raw features, batched, rows in dataset order.
Eigen::MatrixXd embed_dataset(const EncoderParams& params, const Dataset& ds,
                              int batch_size = 256);

// CSV columns: epoch,loss,lr,num_classes,num_singletons,map,cmc1.
void write_train_log_csv(const TrainLog& log, const std::string& path);

}  // namespace tmp
