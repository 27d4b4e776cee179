#include "tmpcl/loss.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tmp {

LossMode parse_loss_mode(const std::string& name) {
  if (name == "tmp") return LossMode::kTmp;
  if (name == "scl") return LossMode::kScl;
  if (name == "instance") return LossMode::kInstance;
  throw std::invalid_argument("unknown loss mode: " + name);
}

std::string loss_mode_name(LossMode mode) {
  switch (mode) {
    case LossMode::kTmp: return "tmp";
    case LossMode::kScl: return "scl";
    case LossMode::kInstance: return "instance";
  }
  return "?";
}

void ViewBatch::validate() const {
  const int m = num_views();
  if (m < 2 || m % 2 != 0) {
    throw std::invalid_argument("ViewBatch: need an even number >= 2 of views");
  }
  if (static_cast<int>(origin.size()) != m ||
      static_cast<int>(labels.size()) != m ||
      static_cast<int>(pair_of.size()) != m) {
    throw std::invalid_argument("ViewBatch: metadata length mismatch");
  }
  for (int i = 0; i < m; ++i) {
    const int j = pair_of[i];
    if (j < 0 || j >= m || j == i || pair_of[j] != i) {
      throw std::invalid_argument("ViewBatch: pair_of is not an involution");
    }
    if (origin[i] != origin[j] || labels[i] != labels[j]) {
      throw std::invalid_argument("ViewBatch: paired views must share origin and label");
    }
  }
}

double cosine_sim(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine_sim: zero-norm vector");
  }
  return a.dot(b) / (na * nb);
}

LossOutput contrastive_loss(const ViewBatch& batch, const LossConfig& cfg) {
  batch.validate();
  if (cfg.temperature <= 0.0) {
    throw std::invalid_argument("loss: temperature must be positive");
  }
  const int m = batch.num_views();
  const double inv_tau = 1.0 / cfg.temperature;

  const std::vector<int>& labels =
      cfg.mode == LossMode::kInstance ? batch.origin : batch.labels;

  Eigen::VectorXd norms(m);
  for (int i = 0; i < m; ++i) {
    norms[i] = batch.embeddings.row(i).norm();
    if (norms[i] == 0.0) {
      throw std::invalid_argument("loss: zero-norm embedding at view " +
                                  std::to_string(i));
    }
  }
  Eigen::MatrixXd unit = batch.embeddings;
  for (int i = 0; i < m; ++i) unit.row(i) /= norms[i];
  const Eigen::MatrixXd sims = unit * unit.transpose();

  double total = 0.0;
  // coeff(i, k) accumulates dL/d s_{ik} for anchor i.
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(m, m);

  std::vector<int> positives, competitors;
  for (int i = 0; i < m; ++i) {
    positives.clear();
    competitors.clear();
    for (int k = 0; k < m; ++k) {
      if (k == i) continue;
      if (labels[k] == labels[i]) {
        positives.push_back(k);
      } else {
        competitors.push_back(k);
      }
    }
    if (positives.empty()) continue;  // lone label, contributes 0

    if (cfg.mode == LossMode::kScl) {
      // One denominator over all k != i, shared by every positive term.
      double mx = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < m; ++k) {
        if (k != i) mx = std::max(mx, sims(i, k) * inv_tau);
      }
      double denom = 0.0;
      for (int k = 0; k < m; ++k) {
        if (k != i) denom += std::exp(sims(i, k) * inv_tau - mx);
      }
      const double log_denom = mx + std::log(denom);
      const double np = static_cast<double>(positives.size());
      for (int j : positives) {
        total += -sims(i, j) * inv_tau + log_denom;
        coeff(i, j) -= inv_tau;
      }
      for (int k = 0; k < m; ++k) {
        if (k == i) continue;
        const double p = std::exp(sims(i, k) * inv_tau - log_denom);
        coeff(i, k) += np * p * inv_tau;
      }
    } else {
      // TMP / INSTANCE: denominator set is {j} plus the other-label views.
      double neg_mx = -std::numeric_limits<double>::infinity();
      for (int k : competitors) neg_mx = std::max(neg_mx, sims(i, k) * inv_tau);
      for (int j : positives) {
        const double mx = std::max(neg_mx, sims(i, j) * inv_tau);
        double denom = std::exp(sims(i, j) * inv_tau - mx);
        for (int k : competitors) denom += std::exp(sims(i, k) * inv_tau - mx);
        const double log_denom = mx + std::log(denom);
        total += -sims(i, j) * inv_tau + log_denom;
        coeff(i, j) +=
            inv_tau * (std::exp(sims(i, j) * inv_tau - log_denom) - 1.0);
        for (int k : competitors) {
          coeff(i, k) += inv_tau * std::exp(sims(i, k) * inv_tau - log_denom);
        }
      }
    }
  }

  const double scale = 1.0 / static_cast<double>(m);
  LossOutput out;
  out.value = total * scale;

  // Chain through s_{ik} = unit_i . unit_k and the normalization:
  //   d s_{ik} / d z_i = (unit_k - s_{ik} unit_i) / |z_i|.
  out.grad = Eigen::MatrixXd::Zero(m, batch.embeddings.cols());
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      const double c = coeff(i, k) * scale;
      if (c == 0.0) continue;
      out.grad.row(i) += c / norms[i] * (unit.row(k) - sims(i, k) * unit.row(i));
      out.grad.row(k) += c / norms[k] * (unit.row(i) - sims(i, k) * unit.row(k));
    }
  }
  return out;
}

}  // namespace tmp
