#include "tmpcl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace tmp {
namespace {

Eigen::MatrixXd normalized_rows(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm == 0.0) {
      throw std::invalid_argument("eval: zero-norm embedding at row " +
                                  std::to_string(i));
    }
    out.row(i) /= norm;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd pairwise_euclidean_normed(const Eigen::MatrixXd& queries,
                                          const Eigen::MatrixXd& gallery) {
  if (queries.cols() != gallery.cols()) {
    throw std::invalid_argument("pairwise distance: dim mismatch");
  }
  const Eigen::MatrixXd q = normalized_rows(queries);
  const Eigen::MatrixXd g = normalized_rows(gallery);
  Eigen::MatrixXd dist(q.rows(), g.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.rows(); ++j) {
      const double d2 = std::max(0.0, 2.0 - 2.0 * q.row(i).dot(g.row(j)));
      dist(i, j) = std::sqrt(d2);
    }
  }
  return dist;
}

double average_precision(const std::vector<bool>& ranked_relevance) {
  int relevant_total = 0;
  for (bool r : ranked_relevance) relevant_total += r ? 1 : 0;
  if (relevant_total == 0) {
    throw std::invalid_argument("average_precision: no relevant items");
  }
  double sum = 0.0;
  int seen = 0;
  for (std::size_t p = 0; p < ranked_relevance.size(); ++p) {
    if (ranked_relevance[p]) {
      ++seen;
      sum += static_cast<double>(seen) / static_cast<double>(p + 1);
    }
  }
  return sum / relevant_total;
}

EvalReport evaluate(const Eigen::MatrixXd& embeddings, const EvalSplit& split,
                    int max_rank) {
  if (max_rank < 1) throw std::invalid_argument("evaluate: max_rank >= 1");
  const Eigen::MatrixXd unit = normalized_rows(embeddings);

  EvalReport report;
  report.cmc.assign(max_rank, 0.0);
  double ap_sum = 0.0;

  for (int qi : split.query) {
    // Protocol filter: drop gallery entries with the same id and camera.
    std::vector<int> kept;
    kept.reserve(split.gallery.size());
    for (int gi : split.gallery) {
      if (gi == qi) continue;
      if (split.identity[gi] == split.identity[qi] &&
          split.camera[gi] == split.camera[qi]) {
        continue;
      }
      kept.push_back(gi);
    }
    bool any_relevant = false;
    for (int gi : kept) {
      if (split.identity[gi] == split.identity[qi]) {
        any_relevant = true;
        break;
      }
    }
    if (!any_relevant) {
      ++report.num_skipped;
      continue;
    }

    std::vector<double> d(kept.size());
    for (std::size_t t = 0; t < kept.size(); ++t) {
      const double d2 = std::max(
          0.0, 2.0 - 2.0 * unit.row(qi).dot(unit.row(kept[t])));
      d[t] = std::sqrt(d2);
    }
    std::vector<int> order(kept.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (d[a] != d[b]) return d[a] < d[b];
      return kept[a] < kept[b];
    });

    std::vector<bool> relevance(order.size());
    int first_match = -1;
    for (std::size_t r = 0; r < order.size(); ++r) {
      relevance[r] = split.identity[kept[order[r]]] == split.identity[qi];
      if (relevance[r] && first_match < 0) first_match = static_cast<int>(r);
    }
    ap_sum += average_precision(relevance);
    if (first_match < max_rank) {
      for (int r = first_match; r < max_rank; ++r) report.cmc[r] += 1.0;
    }
    ++report.num_evaluated;
  }

  if (report.num_evaluated == 0) {
    throw ProtocolError("evaluate: no query has a cross-camera match");
  }
  report.map = ap_sum / report.num_evaluated;
  for (double& v : report.cmc) v /= report.num_evaluated;
  return report;
}

EvalSplit make_identity_split(const Dataset& ds, double query_fraction) {
  if (query_fraction <= 0.0 || query_fraction >= 1.0) {
    throw std::invalid_argument("make_identity_split: fraction in (0,1)");
  }
  EvalSplit split;
  split.identity.resize(ds.size());
  split.camera.resize(ds.size());
  std::vector<std::vector<int>> by_id;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& rec = ds.samples[i];
    if (!rec.true_identity) {
      throw std::invalid_argument(
          "make_identity_split: dataset lacks ground-truth identities");
    }
    split.identity[i] = *rec.true_identity;
    split.camera[i] = rec.camera_id;
    const auto id = static_cast<std::size_t>(*rec.true_identity);
    if (id >= by_id.size()) by_id.resize(id + 1);
    by_id[id].push_back(static_cast<int>(i));
  }
  for (auto& members : by_id) {
    if (members.empty()) continue;
    const int nq = std::max(
        1, static_cast<int>(std::floor(members.size() * query_fraction)));
    const int ng = static_cast<int>(members.size()) - nq;
    for (int t = 0; t < ng; ++t) split.gallery.push_back(members[t]);
    for (std::size_t t = ng; t < members.size(); ++t) {
      split.query.push_back(members[t]);
    }
  }
  return split;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "metric,value\n";
  out.precision(17);
  out << "map," << report.map << "\n";
  out << "num_evaluated," << report.num_evaluated << "\n";
  out << "num_skipped," << report.num_skipped << "\n";
  for (std::size_t r = 0; r < report.cmc.size(); ++r) {
    out << "cmc_rank_" << (r + 1) << "," << report.cmc[r] << "\n";
  }
}

}  // namespace tmp
