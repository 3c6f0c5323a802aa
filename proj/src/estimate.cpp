#include "cslw/estimate.hpp"

#include <algorithm>

namespace cslw {

std::vector<int> WeightMatrix::missing_in(int row) const {
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(columns.size()); ++c)
    if (!cells[row][c].has_value()) out.push_back(c);
  return out;
}

WeightMatrix build_weight_matrix(const std::vector<SampleRecord>& records,
                                 const RequisitePartition& part) {
  WeightMatrix m;
  m.columns = part.diagnostic_evidence;  // name order
  m.column_of.assign(part.n_vars, -1);
  for (int c = 0; c < static_cast<int>(m.columns.size()); ++c)
    m.column_of[m.columns[c]] = c;

  m.cells.assign(records.size(), std::vector<std::optional<double>>(m.columns.size()));
  for (size_t r = 0; r < records.size(); ++r)
    for (const auto& [v, w] : records[r].partial_weights) {
      int c = m.column_of[v];
      if (c < 0)
        throw ModelError("weighted variable '" + std::to_string(v) +
                         "' is not diagnostic evidence");
      m.cells[r][c] = w;
    }
  return m;
}

void fill_missing(WeightMatrix& m, const RuleProgram& prog,
                  const BoundAssignment& evidence, std::uint64_t seed) {
  Simulator sim(prog, evidence, {});
  for (size_t r = 0; r < m.cells.size(); ++r) {
    std::vector<int> missing = m.missing_in(static_cast<int>(r));
    if (missing.empty()) continue;
    RngChooser chooser(derive_seed(seed, r));
    sim.reset();  // one joint state per row
    for (int c : missing)
      m.cells[r][c] = sim.weigh_observed(m.columns[c], chooser);
  }
}

double residual_expectation(const WeightMatrix& filled, std::vector<int> subset,
                            ExpectationMemo& memo) {
  if (subset.empty()) return 1.0;
  std::sort(subset.begin(), subset.end());
  auto it = memo.find(subset);
  if (it != memo.end()) return it->second;

  KahanSum sum;
  for (const auto& row : filled.cells) {
    double p = 1.0;
    for (int c : subset) {
      if (!row[c].has_value())
        throw Error("weight matrix has unfilled cells");
      p *= *row[c];
    }
    sum.add(p);
  }
  double mean = sum.value() / static_cast<double>(filled.cells.size());
  memo.emplace(std::move(subset), mean);
  return mean;
}

Estimate estimate_lw(const std::vector<FullLwSample>& samples) {
  KahanSum num, den;
  Estimate est;
  est.n_samples = static_cast<int>(samples.size());
  est.sample_weights.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.indicator) num.add(s.weight);
    den.add(s.weight);
    est.sample_weights.push_back(s.weight);
  }
  est.numerator = num.value();
  est.denominator = den.value();
  if (est.denominator == 0.0) throw NoEffectiveSamples("all sample weights are zero");
  est.value = est.numerator / est.denominator;
  return est;
}

Estimate estimate_cslw(const std::vector<SampleRecord>& records,
                       const WeightMatrix& filled) {
  ExpectationMemo memo;
  KahanSum num, den;
  Estimate est;
  est.n_samples = static_cast<int>(records.size());
  est.sample_weights.reserve(records.size());

  std::vector<char> present(filled.columns.size());
  for (const auto& rec : records) {
    std::fill(present.begin(), present.end(), 0);
    double w = 1.0;
    // present weights multiplied in column (name) order, then the expected
    // value of the untouched block
    std::vector<std::pair<int, double>> by_col;
    by_col.reserve(rec.partial_weights.size());
    for (const auto& [v, wv] : rec.partial_weights) {
      by_col.emplace_back(filled.column_of[v], wv);
      present[filled.column_of[v]] = 1;
    }
    std::sort(by_col.begin(), by_col.end());
    for (const auto& [c, wv] : by_col) w *= wv;

    std::vector<int> missing;
    for (int c = 0; c < static_cast<int>(filled.columns.size()); ++c)
      if (!present[c]) missing.push_back(c);
    w *= residual_expectation(filled, std::move(missing), memo);

    if (rec.indicator) num.add(w);
    den.add(w);
    est.sample_weights.push_back(w);
  }
  est.numerator = num.value();
  est.denominator = den.value();
  if (est.denominator == 0.0) throw NoEffectiveSamples("all sample weights are zero");
  est.value = est.numerator / est.denominator;
  return est;
}

}  // namespace cslw
