#include "cslw/infer.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace cslw {

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double ess_of(const std::vector<double>& weights) {
  KahanSum s, s2;
  for (double w : weights) {
    s.add(w);
    s2.add(w * w);
  }
  double denom = s2.value();
  return denom > 0 ? s.value() * s.value() / denom : 0.0;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::optional<Method> method_from_name(std::string_view name) {
  if (name == "lw-full") return Method::LwFull;
  if (name == "lw") return Method::Lw;
  if (name == "cslw") return Method::Cslw;
  if (name == "exact-enum") return Method::ExactEnum;
  if (name == "exact-ve") return Method::ExactVe;
  if (name == "exact-ctx") return Method::ExactCtx;
  return std::nullopt;
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::LwFull: return "lw-full";
    case Method::Lw: return "lw";
    case Method::Cslw: return "cslw";
    case Method::ExactEnum: return "exact-enum";
    case Method::ExactVe: return "exact-ve";
    case Method::ExactCtx: return "exact-ctx";
  }
  return "?";
}

const RuleProgram& Model::as_program(CompileMode mode) const {
  if (program && mode == CompileMode::Tree) return *program;
  auto& slot = compiled_[mode == CompileMode::Table ? 0 : 1];
  if (!slot) slot = network_to_program(as_network(), mode);
  return *slot;
}

const Network& Model::as_network() const {
  if (network) return *network;
  if (!derived_net_) derived_net_ = program_to_network(*program);
  return *derived_net_;
}

Model load_model(const std::string& path) {
  Model m;
  m.name = path;
  if (ends_with(path, ".bif"))
    m.network = load_bif(path);
  else
    m.program = load_dcp(path);
  return m;
}

InferResult run_inference(const Model& model, const AssignmentMap& query,
                          const AssignmentMap& evidence, Method method,
                          int n_samples, std::uint64_t seed) {
  InferResult res;
  res.method = method;

  double t0 = now_ms();
  switch (method) {
    case Method::ExactEnum: {
      res.value = model.program ? enumerate_joint(*model.program, query, evidence)
                                : enumerate_joint(model.as_network(), query, evidence);
      break;
    }
    case Method::ExactVe: {
      res.value = variable_elimination(model.as_network(), query, evidence);
      break;
    }
    case Method::ExactCtx: {
      res.value = exact_contextual_sum(model.as_program(CompileMode::Tree), query,
                                       evidence);
      break;
    }
    case Method::LwFull: {
      if (n_samples <= 0) throw ModelError("sample count must be positive");
      auto samples =
          simulate_full_lw(model.as_network(), query, evidence, n_samples, seed);
      Estimate est = estimate_lw(samples);
      res.value = est.value;
      res.n_samples = est.n_samples;
      res.ess = ess_of(est.sample_weights);
      res.mean_assigned =
          static_cast<double>(model.as_network().vars.size() - evidence.size());
      break;
    }
    case Method::Lw:
    case Method::Cslw: {
      if (n_samples <= 0) throw ModelError("sample count must be positive");
      const RuleProgram& prog = model.as_program(
          method == Method::Lw ? CompileMode::Table : CompileMode::Tree);
      BoundAssignment ev = bind_assignment(prog.vars, evidence);
      RequisitePartition part = classify_requisite(prog, query, evidence);

      std::vector<SampleRecord> records =
          simulate_many(prog, query, evidence, n_samples, seed);
      WeightMatrix matrix = build_weight_matrix(records, part);
      fill_missing(matrix, prog, ev, derive_seed(seed, 0x66696c6cull));
      Estimate est = estimate_cslw(records, matrix);

      res.value = est.value;
      res.n_samples = est.n_samples;
      res.ess = ess_of(est.sample_weights);
      std::size_t assigned = 0, weighted = 0;
      for (const auto& r : records) {
        assigned += r.assignment.size();
        weighted += r.partial_weights.size();
      }
      res.mean_assigned = static_cast<double>(assigned) / n_samples;
      res.mean_residual =
          static_cast<double>(matrix.columns.size()) -
          static_cast<double>(weighted) / n_samples;
      break;
    }
  }
  res.elapsed_ms = now_ms() - t0;
  return res;
}

std::vector<BenchCase> parse_bench_spec(std::string_view text) {
  std::vector<BenchCase> cases;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line(text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos));
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    size_t b = 0;
    while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    line = line.substr(b);

    if (!line.empty()) {
      // fields are recognized by their `key=` prefix so evidence lists may
      // contain commas
      static const char* keys[] = {"model", "query", "evidence", "exact"};
      std::vector<std::pair<size_t, int>> marks;
      for (int k = 0; k < 4; ++k) {
        std::string pat = std::string(keys[k]) + "=";
        size_t at = 0;
        while ((at = line.find(pat, at)) != std::string::npos) {
          bool boundary = at == 0 || line[at - 1] == ' ' || line[at - 1] == ',' ||
                          line[at - 1] == '\t';
          if (boundary) marks.emplace_back(at, k);
          at += pat.size();
        }
      }
      std::sort(marks.begin(), marks.end());
      if (marks.empty() || marks.front().first != 0)
        throw ParseError("expected model=... at start of case", {line_no, 1, 1});

      BenchCase c;
      bool have[4] = {false, false, false, false};
      for (size_t i = 0; i < marks.size(); ++i) {
        auto [at, k] = marks[i];
        size_t vstart = at + std::string(keys[k]).size() + 1;
        size_t vend = i + 1 < marks.size() ? marks[i + 1].first : line.size();
        std::string val = line.substr(vstart, vend - vstart);
        while (!val.empty() &&
               (std::isspace(static_cast<unsigned char>(val.back())) || val.back() == ','))
          val.pop_back();
        if (have[k])
          throw ParseError(std::string("duplicate field '") + keys[k] + "'",
                           {line_no, (int)at + 1, 1});
        have[k] = true;
        switch (k) {
          case 0: c.model_path = val; break;
          case 1: c.query = val; break;
          case 2: c.evidence = val; break;
          case 3: c.exact = std::stod(val); break;
        }
      }
      if (!have[0] || !have[1])
        throw ParseError("case needs at least model= and query=", {line_no, 1, 1});
      cases.push_back(std::move(c));
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return cases;
}

std::vector<BenchCase> load_bench_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bench_spec(ss.str());
}

std::string run_bench_csv(const std::vector<BenchCase>& cases,
                          const BenchOptions& opt) {
  if (opt.methods.empty() || opt.samples_list.empty() || opt.runs < 1)
    throw ModelError("bench needs at least one method, sample count and run");

  struct Task {
    int case_i, method_i, n_i, run;
    std::uint64_t seed;
    InferResult result;
    std::string error;
  };

  std::vector<Model> models;
  models.reserve(cases.size());
  for (const auto& c : cases) models.push_back(load_model(c.model_path));
  std::vector<AssignmentMap> queries, evidences;
  std::vector<std::optional<double>> exact;
  for (size_t i = 0; i < cases.size(); ++i) {
    queries.push_back(parse_assignment_list(cases[i].query));
    evidences.push_back(parse_assignment_list(cases[i].evidence));
    exact.push_back(cases[i].exact);
    if (!exact.back()) {
      try {
        exact.back() = variable_elimination(models[i].as_network(), queries.back(),
                                            evidences.back());
      } catch (const std::exception&) {
        // continuous model or budget blown: leave abs_error blank
      }
    }
  }

  std::vector<Task> tasks;
  for (int ci = 0; ci < (int)cases.size(); ++ci)
    for (int mi = 0; mi < (int)opt.methods.size(); ++mi)
      for (int ni = 0; ni < (int)opt.samples_list.size(); ++ni)
        for (int run = 0; run < opt.runs; ++run) {
          Task t{ci, mi, ni, run, 0, {}, {}};
          std::size_t flat = tasks.size();
          t.seed = derive_seed(opt.seed, flat);
          tasks.push_back(std::move(t));
        }

  auto work = [&](Task& t) {
    try {
      t.result = run_inference(models[t.case_i], queries[t.case_i],
                               evidences[t.case_i], opt.methods[t.method_i],
                               opt.samples_list[t.n_i], t.seed);
    } catch (const std::exception& e) {
      t.error = e.what();
    }
  };

  int n_threads = std::max(1, opt.threads);
  if (n_threads == 1) {
    for (auto& t : tasks) work(t);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int k = 0; k < n_threads; ++k)
      pool.emplace_back([&] {
        while (true) {
          size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          work(tasks[i]);
        }
      });
    for (auto& th : pool) th.join();
  }

  std::ostringstream os;
  os << "model,method,N,run,seed,estimate,abs_error,elapsed_ms,samples_per_sec,"
        "n_residual_mean,n_assigned_mean,mae,std,mean_elapsed\n";
  size_t idx = 0;
  for (int ci = 0; ci < (int)cases.size(); ++ci)
    for (int mi = 0; mi < (int)opt.methods.size(); ++mi)
      for (int ni = 0; ni < (int)opt.samples_list.size(); ++ni) {
        std::vector<double> errs;
        KahanSum elapsed_sum;
        for (int run = 0; run < opt.runs; ++run, ++idx) {
          const Task& t = tasks[idx];
          if (!t.error.empty())
            throw Error("bench case '" + cases[ci].model_path + "' (" +
                        std::string(method_name(opt.methods[mi])) + "): " + t.error);
          const InferResult& r = t.result;
          double sps = r.elapsed_ms > 0 ? r.n_samples / (r.elapsed_ms / 1000.0) : 0.0;
          os << cases[ci].model_path << ',' << method_name(opt.methods[mi]) << ','
             << opt.samples_list[ni] << ',' << run << ',' << t.seed << ','
             << fmt17(r.value) << ',';
          if (exact[ci]) {
            double err = std::abs(r.value - *exact[ci]);
            errs.push_back(err);
            os << fmt17(err);
          }
          os << ',' << fmt17(r.elapsed_ms) << ',' << fmt17(sps) << ','
             << fmt17(r.mean_residual) << ',' << fmt17(r.mean_assigned)
             << ",,,\n";
          elapsed_sum.add(r.elapsed_ms);
        }
        // aggregate row for this (model, method, N) block
        double mean_elapsed = elapsed_sum.value() / opt.runs;
        os << cases[ci].model_path << ',' << method_name(opt.methods[mi]) << ','
           << opt.samples_list[ni] << ",agg,,,,,,,,";
        if (!errs.empty()) {
          KahanSum es;
          for (double e : errs) es.add(e);
          double mae = es.value() / errs.size();
          double sd = 0.0;
          if (errs.size() > 1) {
            KahanSum var;
            for (double e : errs) var.add((e - mae) * (e - mae));
            sd = std::sqrt(var.value() / (errs.size() - 1));
          }
          os << fmt17(mae) << ',' << fmt17(sd) << ',';
        } else {
          os << ",,";
        }
        os << fmt17(mean_elapsed) << "\n";
      }
  return os.str();
}

}  // namespace cslw
