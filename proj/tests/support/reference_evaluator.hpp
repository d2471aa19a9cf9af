#pragma once

// Brute-force re-implementation of retrieval recall and both registration
// protocols. Only the input types and the registrar callback are shared with
// the library; retrieval, ground truth, error metrics and aggregation are all
// written out here with plain loops.

#include "lvr/evaluation.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lvr::test {

struct RefPair {
  std::uint64_t query = 0;
  std::uint64_t candidate = 0;
  bool registered = false;
  double rre_deg = 0.0;
  double rte_m = 0.0;
  bool success = false;
};

struct RefReport {
  double r1_5m = 0.0;
  double r5_5m = 0.0;
  double r1_20m = 0.0;
  double r5_20m = 0.0;
  std::size_t registrations = 0;
  std::size_t successes = 0;
  double accuracy_pct = 0.0;
  double mean_rre_deg = 0.0;
  double mean_rte_m = 0.0;
  std::vector<RefPair> pairs;
};

RefReport reference_top1(std::span<const DescribedItem> queries, std::span<const DescribedItem> candidates,
                         const Registrar& reg);
RefReport reference_comprehensive(std::span<const DescribedItem> queries,
                                  std::span<const DescribedItem> candidates, const Registrar& reg);

/// Empty when `got` agrees with `ref`: counts, ids and flags exactly, reals
/// within 1e-9. Otherwise a description of the first difference.
std::string compare_reports(const EvaluationReport& got, const RefReport& ref);

/// Ranking of candidate ids by descriptor distance (ascending, ties by id).
std::vector<std::uint64_t> reference_ranking(const GlobalDescriptor& q, std::span<const DescribedItem> candidates);

}  // namespace lvr::test
