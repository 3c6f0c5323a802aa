// Command-line front end: convert between model formats, run a single query,
// sweep a benchmark grid, or validate a rule program.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cslw/infer.hpp"

using namespace cslw;

namespace {

std::uint64_t default_seed() {
  if (const char* s = std::getenv("CSLW_SEED")) {
    try {
      return std::stoull(s);
    } catch (...) {
      throw Error("CSLW_SEED is not a number");
    }
  }
  return 20240901ull;
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    auto m = method_from_name(tok);
    if (!m) throw Error("unknown method '" + tok + "'");
    out.push_back(*m);
  }
  if (out.empty()) throw Error("empty method list");
  return out;
}

int cmd_convert(const std::string& in_path, const std::string& out_path,
                const std::string& mode_name, double tol) {
  CompileMode mode = mode_name == "table" ? CompileMode::Table : CompileMode::Tree;
  Model m = load_model(in_path);
  const RuleProgram& prog = m.as_program(mode);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write '" + out_path + "'");
  out << serialize_dcp(prog);
  if (m.network) {
    std::size_t table_n = count_rules(*m.network, CompileMode::Table, tol);
    std::size_t tree_n = count_rules(*m.network, CompileMode::Tree, tol);
    std::printf("rules: table=%zu tree=%zu written=%zu mode=%s\n", table_n, tree_n,
                prog.rules.size(), mode_name.c_str());
  } else {
    std::printf("rules: written=%zu mode=%s\n", prog.rules.size(), mode_name.c_str());
  }
  return 0;
}

int cmd_infer(const std::string& model_path, const std::string& query_s,
              const std::string& evidence_s, const std::string& method_s,
              int samples, std::uint64_t seed) {
  auto method = method_from_name(method_s);
  if (!method) throw Error("unknown method '" + method_s + "'");
  Model m = load_model(model_path);
  AssignmentMap query = parse_assignment_list(query_s);
  AssignmentMap evidence = parse_assignment_list(evidence_s);
  InferResult r = run_inference(m, query, evidence, *method, samples, seed);
  std::printf("value=%.17g\n", r.value);
  std::printf("method=%s\n", std::string(method_name(r.method)).c_str());
  if (r.n_samples > 0) {
    std::printf("samples=%d\n", r.n_samples);
    std::printf("ess=%.17g\n", r.ess);
  }
  std::printf("elapsed_ms=%.3f\n", r.elapsed_ms);
  return 0;
}

int cmd_bench(const std::string& spec_path, const std::string& methods_s,
              const std::string& samples_s, int runs, int threads,
              const std::string& out_path, std::uint64_t seed) {
  BenchOptions opt;
  opt.methods = parse_methods(methods_s);
  std::stringstream ss(samples_s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    int n = std::stoi(tok);
    if (n <= 0) throw Error("sample counts must be positive");
    opt.samples_list.push_back(n);
  }
  if (opt.samples_list.empty()) throw Error("empty samples list");
  opt.runs = runs;
  opt.threads = threads;
  opt.seed = seed;

  std::string csv = run_bench_csv(load_bench_spec(spec_path), opt);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error("cannot write '" + out_path + "'");
    out << csv;
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
  }
  return 0;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_validate(const std::string& path) {
  bool is_dcp = path.size() < 4 || path.compare(path.size() - 4, 4, ".bif") != 0;
  RuleProgram prog = is_dcp
                         ? parse_dcp_unchecked(slurp(path))
                         : network_to_program(load_bif(path), CompileMode::Table);
  ValidationReport rep = validate_program(prog);
  std::string text = rep.to_string();
  if (!text.empty()) std::fputs(text.c_str(), stdout);
  if (rep.ok()) {
    std::printf("ok: %d variables, %zu rules\n", prog.vars.size(),
                prog.rules.size());
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"likelihood-weighting inference over rule programs and networks"};
  app.require_subcommand(1);

  std::string in_path, out_path, mode_name = "tree";
  double tol = 1e-9;
  auto* convert = app.add_subcommand("convert", "compile a network into rules");
  convert->add_option("input", in_path, "model file (.bif or .dcp)")->required();
  convert->add_option("output", out_path, "output rule program (.dcp)")->required();
  convert->add_option("--mode", mode_name, "tree|table (default tree)")
      ->check(CLI::IsMember({"tree", "table"}));
  convert->add_option("--tol", tol, "distribution-merge tolerance");

  std::string model_path, query_s, evidence_s, method_s = "cslw";
  int samples = 10000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  auto* infer = app.add_subcommand("infer", "estimate P(query | evidence)");
  infer->add_option("--model,-m", model_path, "model file")->required();
  infer->add_option("--query,-q", query_s, "var=value[,var=value...]")->required();
  infer->add_option("--evidence,-e", evidence_s, "var=value[,var=value...]");
  infer->add_option("--method", method_s,
                    "lw-full|lw|cslw|exact-enum|exact-ve|exact-ctx");
  infer->add_option("--samples,-n", samples, "sample count");
  infer->add_option("--seed,-s", seed, "rng seed (default env CSLW_SEED)")
      ->each([&](const std::string&) { seed_set = true; });

  std::string spec_path, methods_s = "lw,cslw", samples_s = "1000", bench_out;
  int runs = 3, threads = 1;
  auto* bench = app.add_subcommand("bench", "sweep methods x sample counts, emit CSV");
  bench->add_option("--spec", spec_path, "benchmark case file")->required();
  bench->add_option("--methods", methods_s, "comma-separated method list");
  bench->add_option("--samples-list", samples_s, "comma-separated sample counts");
  bench->add_option("--runs", runs, "replications per cell");
  bench->add_option("--threads", threads, "worker threads");
  bench->add_option("--out,-o", bench_out, "CSV path (default stdout)");
  bench->add_option("--seed,-s", seed, "rng seed (default env CSLW_SEED)")
      ->each([&](const std::string&) { seed_set = true; });

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check rule exclusiveness/exhaustiveness");
  validate->add_option("input", validate_path, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);   // prints usage/help; collapse CLI11's codes to 1
    return rc == 0 ? 0 : 1;
  }

  try {
    if (!seed_set) seed = default_seed();
    if (*convert) return cmd_convert(in_path, out_path, mode_name, tol);
    if (*infer) return cmd_infer(model_path, query_s, evidence_s, method_s, samples, seed);
    if (*bench) return cmd_bench(spec_path, methods_s, samples_s, runs, threads, bench_out, seed);
    if (*validate) return cmd_validate(validate_path);
  } catch (const NoEffectiveSamples& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
