#pragma once

#include <vector>

#include <Eigen/Core>

#include "tmpcl/labelgen.hpp"
#include "tmpcl/rng.hpp"

namespace tmp {

struct SamplerConfig {
  int batch_size = 256;  // N
  int k = 4;             // instances per class; singletons contribute 1
  bool use_pk = true;
};

// Identity-balanced epoch plan over pseudo-labels. Classes are visited in a
// shuffled order, each exactly once per epoch; non-singleton classes
// contribute k instances (with replacement when the class has fewer than k
// members), singletons contribute 1. A batch closes at batch_size indices;
// the group at the boundary is truncated.
std::vector<std::vector<int>> pk_sample_epoch(const PseudoLabeling& labeling,
                                              const SamplerConfig& cfg,
                                              Rng& rng);

// Shuffled indices chunked into batches.
std::vector<std::vector<int>> random_sample_epoch(int n, int batch_size,
                                                  Rng& rng);

struct ViewConfig {
  double noise_std = 0.05;
  double mask_prob = 0.1;
  double scale_jitter = 0.1;
};

struct Views {
  Eigen::MatrixXd inputs;    // 2B x D; rows 2t, 2t+1 are views of sample t
  std::vector<int> pair_of;  // sibling view index
};

// Two independent stochastic views per row: scale by (1 + u*scale_jitter)
// with u uniform in [-1, 1], zero coordinates with probability mask_prob,
// add gaussian noise.
Views make_views(const Eigen::MatrixXd& raw_features, const ViewConfig& cfg,
                 Rng& rng);

}  // namespace tmp
