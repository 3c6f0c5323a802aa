#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "cslw/compile.hpp"
#include "cslw/estimate.hpp"
#include "cslw/oracle.hpp"
#include "cslw/parser.hpp"

namespace cslw {

enum class Method { LwFull, Lw, Cslw, ExactEnum, ExactVe, ExactCtx };

std::optional<Method> method_from_name(std::string_view name);
std::string_view method_name(Method m);

// A model file is either a rule program (.dcp) or a network (.bif); methods
// that need the other form convert on the fly (tree mode for rules from a
// network, table mode for the requisite-only baseline).
struct Model {
  std::optional<RuleProgram> program;
  std::optional<Network> network;
  std::string name;

  const RuleProgram& as_program(CompileMode mode) const;
  const Network& as_network() const;

 private:
  mutable std::optional<RuleProgram> compiled_[2];
  mutable std::optional<Network> derived_net_;
};

Model load_model(const std::string& path);

struct InferResult {
  Method method = Method::Cslw;
  double value = 0.0;
  int n_samples = 0;
  double ess = 0.0;          // effective sample count of the denominator
  double elapsed_ms = 0.0;   // sampling + estimation only
  double mean_assigned = 0.0;  // sampled variables per simulation
  double mean_residual = 0.0;  // residual evidence variables per simulation
};

InferResult run_inference(const Model& model, const AssignmentMap& query,
                          const AssignmentMap& evidence, Method method,
                          int n_samples, std::uint64_t seed);

struct BenchCase {
  std::string model_path;
  std::string query;
  std::string evidence;
  std::optional<double> exact;
};

// Line format: model=PATH, query=LIST, evidence=LIST, exact=VALUE
// (evidence/exact optional; `#` comments and blank lines allowed).
std::vector<BenchCase> parse_bench_spec(std::string_view text);
std::vector<BenchCase> load_bench_spec(const std::string& path);

struct BenchOptions {
  std::vector<Method> methods;
  std::vector<int> samples_list;
  int runs = 3;
  int threads = 1;
  std::uint64_t seed = 0;
};

// One row per (case, method, N, run) plus an aggregate row per (case, method,
// N). Replications fan out over `threads` with seeds derived from (seed, row
// index), so the CSV is identical for any thread count.
std::string run_bench_csv(const std::vector<BenchCase>& cases,
                          const BenchOptions& opt);

}  // namespace cslw
