#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cslw/infer.hpp"

namespace testsup {

inline bool near(double x, double y, double tol) { return std::fabs(x - y) <= tol; }

std::string models_dir();
std::string model_path(const std::string& name);

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};
// Runs the built CLI binary with `args` appended (shell-quoted by caller).
CliResult run_cli(const std::string& args);

std::string slurp(const std::string& path);
void spit(const std::string& path, const std::string& text);
std::string temp_path(const std::string& stem);

// Random discrete network: v0..v{n-1}, each with up to max_parents parents
// drawn from earlier variables and rows sampled from a flat Dirichlet.
// structured=true makes a share of rows repeat so tree compilation collapses.
cslw::Network random_network(cslw::Rng& rng, int n_vars, int max_parents,
                             int max_card, bool structured = false);

// Random rule program: a random network compiled in a random mode, sometimes
// extended with a gaussian leaf and a discrete child thresholding it.
cslw::RuleProgram random_program(cslw::Rng& rng, int n_vars, bool allow_continuous);

// Uniformly random query/evidence pair over disjoint variable subsets.
void random_query_evidence(cslw::Rng& rng, const cslw::VariableTable& vars,
                           cslw::AssignmentMap& query, cslw::AssignmentMap& evidence,
                           int n_query = 1, int n_evidence = 2);

std::string serialize_bif(const cslw::Network& net);

}  // namespace testsup
