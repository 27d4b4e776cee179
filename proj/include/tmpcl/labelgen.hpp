#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "tmpcl/rng.hpp"

namespace tmp {

struct ClusterConfig {
  double epsilon = 0.75;
  int min_samples = 4;
  int k1 = 30;
  int k2 = 6;

  // Desk-scale guard: k-reciprocal sets degenerate when k1 approaches n.
  ClusterConfig scaled_down(int n) const;
};

// k-reciprocal Jaccard distance over l2-normalized rows. Symmetric, zero
// diagonal, entries in [0, 1]. Requires n > k1.
Eigen::MatrixXd jaccard_distance(const Eigen::MatrixXd& embeddings, int k1,
                                 int k2);

constexpr int kNoise = -1;

// Density clustering on a precomputed distance matrix. Returns a cluster id
// per point, kNoise for unclustered points. A point is core iff at least
// min_samples points (itself included) lie within epsilon. Border points go
// to the lowest-index core point that reaches them.
std::vector<int> dbscan(const Eigen::MatrixXd& dist, const ClusterConfig& cfg);

struct PseudoLabeling {
  std::vector<int> labels;  // class ids 0..num_classes-1
  int num_classes = 0;
  std::vector<bool> is_singleton;

  int singleton_count() const;
};

// Each cluster becomes a class, each noise point its own singleton class.
PseudoLabeling assign_pseudo_labels(const std::vector<int>& raw_clusters);

struct PulConfig {
  int k_means_k = 50;
  double reliability = 0.8;  // lambda
  int max_iters = 100;
  int restarts = 3;
};

// Spherical k-means; samples whose cosine similarity to their own centroid
// falls below the reliability threshold become singleton classes.
PseudoLabeling pul_labels(const Eigen::MatrixXd& embeddings,
                          const PulConfig& cfg, Rng& rng);

enum class LabelGenerator { kDbscan, kPul };

LabelGenerator parse_label_generator(const std::string& name);

PseudoLabeling generate_labels(const Eigen::MatrixXd& embeddings,
                               LabelGenerator generator,
                               const ClusterConfig& cluster_cfg,
                               const PulConfig& pul_cfg, Rng& rng);

// Debug dumps (row-major CSV).
void dump_distance_matrix_csv(const Eigen::MatrixXd& dist,
                              const std::string& path);
void dump_labeling_csv(const PseudoLabeling& labeling, const std::string& path);

}  // namespace tmp
