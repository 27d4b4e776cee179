#include "tmpcl/labelgen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tmp {
namespace {

// Rows l2-normalized; throws on zero rows or non-finite entries.
Eigen::MatrixXd normalized_rows(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) {
    throw std::invalid_argument("labelgen: non-finite embedding entries");
  }
  Eigen::MatrixXd out = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm == 0.0) {
      throw std::invalid_argument("labelgen: zero-norm embedding at row " +
                                  std::to_string(i));
    }
    out.row(i) /= norm;
  }
  return out;
}

// Neighbor lists sorted by (distance, index). The point itself is always
// first (distance 0), following the k-reciprocal re-ranking construction.
std::vector<std::vector<int>> sorted_neighbors(const Eigen::MatrixXd& dist) {
  const int n = static_cast<int>(dist.rows());
  std::vector<std::vector<int>> order(n);
  for (int p = 0; p < n; ++p) {
    order[p].resize(n);
    std::iota(order[p].begin(), order[p].end(), 0);
    std::sort(order[p].begin(), order[p].end(), [&](int a, int b) {
      if (dist(p, a) != dist(p, b)) return dist(p, a) < dist(p, b);
      return a < b;
    });
  }
  return order;
}

std::vector<int> k_reciprocal(const std::vector<std::vector<int>>& order,
                              const std::vector<std::vector<char>>& in_knn,
                              int p, int k) {
  std::vector<int> r;
  for (int idx = 0; idx < k && idx < static_cast<int>(order[p].size()); ++idx) {
    const int g = order[p][idx];
    if (in_knn[g][p]) r.push_back(g);
  }
  return r;
}

}  // namespace

ClusterConfig ClusterConfig::scaled_down(int n) const {
  ClusterConfig out = *this;
  out.k1 = std::min(k1, std::max(2, n / 4));
  out.k2 = std::min(k2, out.k1);
  return out;
}

Eigen::MatrixXd jaccard_distance(const Eigen::MatrixXd& embeddings, int k1,
                                 int k2) {
  const int n = static_cast<int>(embeddings.rows());
  if (n <= k1) {
    throw std::invalid_argument("jaccard_distance: need n > k1");
  }
  if (k2 > k1 || k2 < 1) {
    throw std::invalid_argument("jaccard_distance: need 1 <= k2 <= k1");
  }
  const Eigen::MatrixXd unit = normalized_rows(embeddings);

  // Base distance: euclidean between normalized rows.
  Eigen::MatrixXd base(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double d2 = std::max(0.0, 2.0 - 2.0 * unit.row(i).dot(unit.row(j)));
      base(i, j) = base(j, i) = std::sqrt(d2);
    }
    base(i, i) = 0.0;
  }

  const auto order = sorted_neighbors(base);

  // in_knn[p][g]: g among the k1 nearest of p (self included).
  std::vector<std::vector<char>> in_knn(n, std::vector<char>(n, 0));
  for (int p = 0; p < n; ++p) {
    for (int idx = 0; idx <= k1 && idx < n; ++idx) in_knn[p][order[p][idx]] = 1;
  }
  // Same for the half-size neighborhood used by the expansion step.
  const int half = k1 / 2;
  std::vector<std::vector<char>> in_knn_half(n, std::vector<char>(n, 0));
  for (int p = 0; p < n; ++p) {
    for (int idx = 0; idx <= half && idx < n; ++idx) {
      in_knn_half[p][order[p][idx]] = 1;
    }
  }

  std::vector<std::vector<int>> recip(n), recip_half(n);
  for (int p = 0; p < n; ++p) {
    recip[p] = k_reciprocal(order, in_knn, p, k1 + 1);
    recip_half[p] = k_reciprocal(order, in_knn_half, p, half + 1);
  }

  // Expanded reciprocal sets, then gaussian-of-distance weight vectors,
  // kept sparse: each row only has entries on its expanded set.
  std::vector<std::vector<std::pair<int, double>>> weights(n);
  for (int p = 0; p < n; ++p) {
    std::vector<char> in_rp(n, 0);
    for (int g : recip[p]) in_rp[g] = 1;
    std::vector<char> member = in_rp;
    for (int q : recip[p]) {
      int overlap = 0;
      for (int g : recip_half[q]) overlap += in_rp[g];
      if (3 * overlap >= 2 * static_cast<int>(recip_half[q].size())) {
        for (int g : recip_half[q]) member[g] = 1;
      }
    }
    for (int g = 0; g < n; ++g) {
      if (member[g]) weights[p].emplace_back(g, std::exp(-base(p, g)));
    }
  }

  // Local query expansion over the k2 nearest (self included).
  std::vector<std::vector<std::pair<int, double>>> expanded(n);
  const double inv_k2 = 1.0 / static_cast<double>(std::min(k2, n));
  {
    std::vector<double> acc(n, 0.0);
    std::vector<int> touched;
    for (int p = 0; p < n; ++p) {
      touched.clear();
      for (int idx = 0; idx < k2 && idx < n; ++idx) {
        for (const auto& [g, v] : weights[order[p][idx]]) {
          if (acc[g] == 0.0) touched.push_back(g);
          acc[g] += v;
        }
      }
      std::sort(touched.begin(), touched.end());
      for (int g : touched) {
        expanded[p].emplace_back(g, acc[g] * inv_k2);
        acc[g] = 0.0;
      }
    }
  }

  // Jaccard over sparse rows: with non-negative entries,
  // sum(max) = S_p + S_g - sum(min), and sum(min) only needs the shared
  // support, reached through an inverted index.
  std::vector<double> row_sum(n, 0.0);
  std::vector<std::vector<std::pair<int, double>>> by_coord(n);
  for (int p = 0; p < n; ++p) {
    for (const auto& [g, v] : expanded[p]) {
      row_sum[p] += v;
      by_coord[g].emplace_back(p, v);
    }
  }

  Eigen::MatrixXd jaccard = Eigen::MatrixXd::Constant(n, n, 1.0);
  std::vector<double> min_sum(n, 0.0);
  for (int p = 0; p < n; ++p) {
    std::fill(min_sum.begin(), min_sum.end(), 0.0);
    for (const auto& [t, vp] : expanded[p]) {
      for (const auto& [g, vg] : by_coord[t]) {
        min_sum[g] += std::min(vp, vg);
      }
    }
    for (int g = 0; g < n; ++g) {
      const double max_sum = row_sum[p] + row_sum[g] - min_sum[g];
      if (max_sum > 0.0) jaccard(p, g) = 1.0 - min_sum[g] / max_sum;
    }
    jaccard(p, p) = 0.0;
  }
  return jaccard;
}

std::vector<int> dbscan(const Eigen::MatrixXd& dist, const ClusterConfig& cfg) {
  const int n = static_cast<int>(dist.rows());
  if (dist.cols() != n) throw std::invalid_argument("dbscan: square matrix required");
  if (cfg.min_samples < 2) {
    throw std::invalid_argument("dbscan: min_samples must be >= 2");
  }

  std::vector<std::vector<int>> within(n);
  std::vector<char> core(n, 0);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (dist(p, q) <= cfg.epsilon) within[p].push_back(q);
    }
    core[p] = within[p].size() >= static_cast<std::size_t>(cfg.min_samples);
  }

  std::vector<int> cluster(n, kNoise);
  int next_id = 0;
  for (int seed = 0; seed < n; ++seed) {
    if (!core[seed] || cluster[seed] != kNoise) continue;
    const int id = next_id++;
    std::deque<int> frontier{seed};
    cluster[seed] = id;
    while (!frontier.empty()) {
      const int p = frontier.front();
      frontier.pop_front();
      for (int q : within[p]) {
        if (core[q] && cluster[q] == kNoise) {
          cluster[q] = id;
          frontier.push_back(q);
        }
      }
    }
  }

  // Border points: lowest-index core point within epsilon wins the tie.
  for (int p = 0; p < n; ++p) {
    if (core[p] || cluster[p] != kNoise) continue;
    for (int q : within[p]) {
      if (core[q]) {
        cluster[p] = cluster[q];
        break;
      }
    }
  }
  return cluster;
}

int PseudoLabeling::singleton_count() const {
  int c = 0;
  for (bool s : is_singleton) c += s ? 1 : 0;
  return c;
}

PseudoLabeling assign_pseudo_labels(const std::vector<int>& raw_clusters) {
  const int n = static_cast<int>(raw_clusters.size());
  PseudoLabeling out;
  out.labels.resize(n);
  std::vector<int> remap;  // raw cluster id -> class id, by first appearance
  for (int i = 0; i < n; ++i) {
    const int raw = raw_clusters[i];
    if (raw == kNoise) {
      out.labels[i] = out.num_classes++;
      continue;
    }
    if (raw >= static_cast<int>(remap.size())) remap.resize(raw + 1, -1);
    if (remap[raw] < 0) remap[raw] = out.num_classes++;
    out.labels[i] = remap[raw];
  }
  std::vector<int> sizes(out.num_classes, 0);
  for (int c : out.labels) ++sizes[c];
  out.is_singleton.resize(n);
  for (int i = 0; i < n; ++i) out.is_singleton[i] = sizes[out.labels[i]] == 1;
  return out;
}

PseudoLabeling pul_labels(const Eigen::MatrixXd& embeddings,
                          const PulConfig& cfg, Rng& rng) {
  const int n = static_cast<int>(embeddings.rows());
  const int k = cfg.k_means_k;
  if (k < 1 || k > n) {
    throw std::invalid_argument("pul_labels: need 1 <= k <= n");
  }
  const Eigen::MatrixXd unit = normalized_rows(embeddings);
  const int d = static_cast<int>(unit.cols());

  auto run_once = [&](Rng& r) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    r.shuffle(perm);
    Eigen::MatrixXd centroids(k, d);
    for (int c = 0; c < k; ++c) centroids.row(c) = unit.row(perm[c]);

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
      const Eigen::MatrixXd sims = unit * centroids.transpose();
      bool changed = iter == 0;
      for (int i = 0; i < n; ++i) {
        int best = 0;
        for (int c = 1; c < k; ++c) {
          if (sims(i, c) > sims(i, best)) best = c;
        }
        if (assign[i] != best) {
          assign[i] = best;
          changed = true;
        }
      }
      if (!changed) break;

      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
      std::vector<int> counts(k, 0);
      for (int i = 0; i < n; ++i) {
        sums.row(assign[i]) += unit.row(i);
        ++counts[assign[i]];
      }
      for (int c = 0; c < k; ++c) {
        if (counts[c] == 0) {
          // Re-seed an empty cluster to the point farthest from its centroid.
          int far = 0;
          double worst = std::numeric_limits<double>::infinity();
          for (int i = 0; i < n; ++i) {
            const double s = unit.row(i).dot(centroids.row(assign[i]));
            if (s < worst) {
              worst = s;
              far = i;
            }
          }
          centroids.row(c) = unit.row(far);
          continue;
        }
        const double norm = sums.row(c).norm();
        if (norm > 0.0) centroids.row(c) = sums.row(c) / norm;
      }
    }
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
      cost += 1.0 - unit.row(i).dot(centroids.row(assign[i]));
    }
    return std::make_pair(cost, std::make_pair(assign, centroids));
  };

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> assign;
  Eigen::MatrixXd centroids;
  const int restarts = std::max(1, cfg.restarts);
  for (int r = 0; r < restarts; ++r) {
    auto [cost, result] = run_once(rng);
    if (cost < best_cost) {
      best_cost = cost;
      assign = std::move(result.first);
      centroids = std::move(result.second);
    }
  }

  // Reliability gate: below-threshold samples become singleton classes.
  PseudoLabeling out;
  out.labels.resize(n);
  std::vector<int> remap(k, -1);
  for (int i = 0; i < n; ++i) {
    const double sim = unit.row(i).dot(centroids.row(assign[i]));
    if (sim >= cfg.reliability) {
      if (remap[assign[i]] < 0) remap[assign[i]] = out.num_classes++;
      out.labels[i] = remap[assign[i]];
    } else {
      out.labels[i] = -1;  // filled below
    }
  }
  for (int i = 0; i < n; ++i) {
    if (out.labels[i] < 0) out.labels[i] = out.num_classes++;
  }
  std::vector<int> sizes(out.num_classes, 0);
  for (int c : out.labels) ++sizes[c];
  out.is_singleton.resize(n);
  for (int i = 0; i < n; ++i) out.is_singleton[i] = sizes[out.labels[i]] == 1;
  return out;
}

LabelGenerator parse_label_generator(const std::string& name) {
  if (name == "dbscan") return LabelGenerator::kDbscan;
  if (name == "pul") return LabelGenerator::kPul;
  throw std::invalid_argument("unknown label generator: " + name);
}

PseudoLabeling generate_labels(const Eigen::MatrixXd& embeddings,
                               LabelGenerator generator,
                               const ClusterConfig& cluster_cfg,
                               const PulConfig& pul_cfg, Rng& rng) {
  if (generator == LabelGenerator::kPul) {
    return pul_labels(embeddings, pul_cfg, rng);
  }
  const ClusterConfig cfg =
      cluster_cfg.scaled_down(static_cast<int>(embeddings.rows()));
  const Eigen::MatrixXd dist = jaccard_distance(embeddings, cfg.k1, cfg.k2);
  return assign_pseudo_labels(dbscan(dist, cfg));
}

void dump_distance_matrix_csv(const Eigen::MatrixXd& dist,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const Eigen::IOFormat csv(Eigen::FullPrecision, Eigen::DontAlignCols, ",",
                            "\n");
  out << dist.format(csv) << "\n";
}

void dump_labeling_csv(const PseudoLabeling& labeling,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "index,label,is_singleton\n";
  for (std::size_t i = 0; i < labeling.labels.size(); ++i) {
    out << i << "," << labeling.labels[i] << ","
        << (labeling.is_singleton[i] ? 1 : 0) << "\n";
  }
}

}  // namespace tmp
