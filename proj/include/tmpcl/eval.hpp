#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tmpcl/dataset.hpp"

namespace tmp {

// Query/gallery split with per-index identity and camera id. Queries and
// gallery may overlap; the evaluation protocol filters same-id same-camera
// entries per query.
struct EvalSplit {
  std::vector<int> query;
  std::vector<int> gallery;
  std::vector<std::int64_t> identity;   // per dataset index
  std::vector<std::uint32_t> camera;    // per dataset index
};

struct EvalReport {
  double map = 0.0;
  std::vector<double> cmc;  // cmc[r-1] = fraction matched within rank r
  int num_evaluated = 0;
  int num_skipped = 0;  // queries with no cross-camera relevant gallery item
};

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rows l2-normalized, then euclidean distance. d^2 = 2 - 2*cos_sim.
Eigen::MatrixXd pairwise_euclidean_normed(const Eigen::MatrixXd& queries,
                                          const Eigen::MatrixXd& gallery);

// AP = (1/R) * sum over relevant positions p (1-based) of
// (count of relevant at or before p) / p.
double average_precision(const std::vector<bool>& ranked_relevance);

// Cross-camera retrieval metrics. Gallery entries sharing both identity and
// camera with the query are excluded; remaining ranked by distance with
// stable index tie-break. Queries without any relevant cross-camera gallery
// item are skipped and counted. Throws ProtocolError when no query is
// evaluable.
EvalReport evaluate(const Eigen::MatrixXd& embeddings, const EvalSplit& split,
                    int max_rank);

// Per identity, the last query_fraction of its samples (at least one) become
// queries, the rest gallery. Requires ground-truth identities.
EvalSplit make_identity_split(const Dataset& ds, double query_fraction = 0.25);

void write_report_csv(const EvalReport& report, const std::string& path);

}  // namespace tmp
