#pragma once

#include <map>
#include <optional>

#include "cslw/engine.hpp"

namespace cslw {

// Zero denominator: every simulated sample had weight zero.
class NoEffectiveSamples : public Error {
 public:
  using Error::Error;
};

// Per-sample weights of the diagnostic evidence. One row per simulation, one
// column per diagnostic-evidence variable (name order); a missing cell means
// that simulation never reached the variable (its weight is residual).
struct WeightMatrix {
  std::vector<VarId> columns;
  std::vector<int> column_of;  // var -> column index or -1
  std::vector<std::vector<std::optional<double>>> cells;

  std::vector<int> missing_in(int row) const;
};

WeightMatrix build_weight_matrix(const std::vector<SampleRecord>& records,
                                 const RequisitePartition& part);

// Completes every row by drawing one joint state per row: a fresh simulation
// state (same evidence), each missing column weighted in column order within
// that shared state. Rows use independent streams derived from (seed, row),
// so the result is identical however rows are scheduled.
void fill_missing(WeightMatrix& m, const RuleProgram& prog,
                  const BoundAssignment& evidence, std::uint64_t seed);

using ExpectationMemo = std::map<std::vector<int>, double>;

// Mean over all rows of the product of the subset's columns (the empty subset
// gives 1). `subset` holds column indices; results are memoized under the
// sorted subset.
double residual_expectation(const WeightMatrix& filled, std::vector<int> subset,
                            ExpectationMemo& memo);

struct Estimate {
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  int n_samples = 0;
  std::vector<double> sample_weights;  // per-sample denominator contribution
};

// Ratio estimator for plain likelihood weighting: sum f*w / sum w.
Estimate estimate_lw(const std::vector<FullLwSample>& samples);

// Ratio estimator with residual-weight expectations: each sample contributes
// indicator * (product of its present weights) * E[product of its missing
// columns], the expectation taken over the filled matrix. Throws Error if
// every weight is zero (no effective samples).
Estimate estimate_cslw(const std::vector<SampleRecord>& records,
                       const WeightMatrix& filled);

}  // namespace cslw
