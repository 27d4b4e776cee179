#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace tmp {

enum class LossMode {
  kTmp,       // positives = same pseudo-label, competitors exclude them
  kScl,       // supervised-contrastive: denominator over all other views
  kInstance,  // each origin is its own class (NT-Xent / SimCLR)
};

LossMode parse_loss_mode(const std::string& name);
std::string loss_mode_name(LossMode mode);

struct LossConfig {
  double temperature = 0.05;
  LossMode mode = LossMode::kTmp;
};

// 2N augmented views. Views 2k and 2k+1 come from the same sample and share
// origin and label; pair_of is a fixed-point-free involution.
struct ViewBatch {
  Eigen::MatrixXd embeddings;  // 2N x d
  std::vector<int> origin;
  std::vector<int> labels;
  std::vector<int> pair_of;

  int num_views() const { return static_cast<int>(embeddings.rows()); }
  void validate() const;
};

struct LossOutput {
  double value = 0.0;
  Eigen::MatrixXd grad;  // dL/d(embeddings), before l2-normalization
};

// a.b / (|a||b|). Zero-norm input is an error.
double cosine_sim(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Per anchor i and positive j (same label, j != i):
//   L_ij = -log( exp(s_ij/t) / sum_{k != i, k = j or y_k != y_i} exp(s_ik/t) )
// with s the cosine similarity; SCL replaces the denominator set by all
// k != i; INSTANCE relabels each origin as its own class. Value is the mean
// over all 2N views of sum_j L_ij. grad is the exact derivative through the
// softmax and the row normalization, w.r.t. the raw embeddings.
LossOutput contrastive_loss(const ViewBatch& batch, const LossConfig& cfg);

}  // namespace tmp
