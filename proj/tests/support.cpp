#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#ifndef _WIN32
#include <sys/wait.h>
#include <unistd.h>
#endif

#include "cslw/compile.hpp"

namespace testsup {

using namespace cslw;

std::string models_dir() { return CSLW_MODELS_DIR; }

std::string model_path(const std::string& name) {
  return models_dir() + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::string temp_path(const std::string& stem) {
  static int counter = 0;
  std::ostringstream ss;
  const char* dir = std::getenv("TMPDIR");
  ss << (dir ? dir : "/tmp") << "/cslw_test_" << getpid() << "_" << counter++
     << "_" << stem;
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  std::string out_file = temp_path("out.txt");
  std::string err_file = temp_path("err.txt");
  std::string cmd = std::string(CSLW_CLI_PATH) + " " + args + " >" + out_file +
                    " 2>" + err_file;
  int rc = std::system(cmd.c_str());
  CliResult res;
#ifdef _WIN32
  res.exit_code = rc;
#else
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
#endif
  res.out = slurp(out_file);
  res.err = slurp(err_file);
  std::remove(out_file.c_str());
  std::remove(err_file.c_str());
  return res;
}

namespace {

DiscreteDist random_dist(Rng& rng, int card) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  DiscreteDist d;
  d.probs.resize(card);
  double total = 0;
  for (auto& p : d.probs) total += (p = u(rng));
  for (auto& p : d.probs) p /= total;
  return d;
}

}  // namespace

Network random_network(Rng& rng, int n_vars, int max_parents, int max_card,
                       bool structured) {
  Network net;
  for (int i = 0; i < n_vars; ++i) {
    Variable v;
    v.name = "v" + std::to_string(i);
    int card = max_card <= 2 ? 2 : 2 + static_cast<int>(rng() % (max_card - 1));
    for (int k = 0; k < card; ++k) v.domain.push_back(std::to_string(k));
    net.vars.add(std::move(v));
  }
  net.parents.resize(n_vars);
  for (int i = 0; i < n_vars; ++i) {
    int avail = i;
    int k = std::min(max_parents, avail);
    if (k > 0) k = static_cast<int>(rng() % (k + 1));
    std::vector<VarId> pool;
    for (int j = 0; j < i; ++j) pool.push_back(j);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    net.parents[i] = pool;
  }
  for (int i = 0; i < n_vars; ++i) {
    int rows = net.row_count(i);
    int card = static_cast<int>(net.vars[i].domain.size());
    TabularCpd cpd;
    if (!structured || net.parents[i].empty()) {
      for (int r = 0; r < rows; ++r) cpd.rows.push_back(random_dist(rng, card));
    } else {
      // rows depend only on a random subset of the parents, so the tree
      // compiler has real structure to find
      const auto& ps = net.parents[i];
      std::vector<int> relevant;
      for (size_t j = 0; j < ps.size(); ++j)
        if (rng() % 2 == 0) relevant.push_back(static_cast<int>(j));
      if (relevant.size() == ps.size() && !relevant.empty()) relevant.pop_back();
      int pool_size = 1;
      for (int j : relevant)
        pool_size *= static_cast<int>(net.vars[ps[j]].domain.size());
      std::vector<DiscreteDist> pool;
      for (int p = 0; p < pool_size; ++p) pool.push_back(random_dist(rng, card));
      for (int r = 0; r < rows; ++r) {
        // decode row (rightmost parent fastest), project onto the subset
        std::vector<int> vals(ps.size());
        int rem = r;
        for (int j = static_cast<int>(ps.size()) - 1; j >= 0; --j) {
          int c = static_cast<int>(net.vars[ps[j]].domain.size());
          vals[j] = rem % c;
          rem /= c;
        }
        int key = 0;
        for (int j : relevant)
          key = key * static_cast<int>(net.vars[ps[j]].domain.size()) + vals[j];
        cpd.rows.push_back(pool[key]);
      }
    }
    net.cpds.push_back(std::move(cpd));
  }
  return net;
}

RuleProgram random_program(Rng& rng, int n_vars, bool allow_continuous) {
  Network net = random_network(rng, n_vars, 3, 3, rng() % 2 == 0);
  CompileMode mode = rng() % 2 == 0 ? CompileMode::Table : CompileMode::Tree;
  RuleProgram prog = network_to_program(net, mode);

  if (allow_continuous && rng() % 2 == 0) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    VarId parent = static_cast<VarId>(rng() % prog.vars.size());
    Variable g;
    g.name = "t" + std::to_string(n_vars);
    g.kind = VarKind::Continuous;
    VarId gid = prog.vars.add(std::move(g));
    for (int val = 0; val < (int)prog.vars[parent].domain.size(); ++val) {
      Rule r;
      r.head = gid;
      r.dist = Gaussian{u(rng), 0.5 + std::abs(u(rng))};
      r.body.push_back(Atom{parent, Cmp::Eq, Value{val}});
      prog.rules.push_back(std::move(r));
    }
    Variable t;
    t.name = "u" + std::to_string(n_vars + 1);
    t.domain = {"0", "1"};
    VarId tid = prog.vars.add(std::move(t));
    double thresh = u(rng);
    Rule lo, hi;
    lo.head = tid;
    lo.dist = Bernoulli{0.2};
    lo.body.push_back(Atom{gid, Cmp::Le, Value{thresh}});
    hi.head = tid;
    hi.dist = Bernoulli{0.9};
    hi.body.push_back(Atom{gid, Cmp::Gt, Value{thresh}});
    prog.rules.push_back(std::move(lo));
    prog.rules.push_back(std::move(hi));
    prog.finalize();
  }
  return prog;
}

void random_query_evidence(Rng& rng, const VariableTable& vars,
                           AssignmentMap& query, AssignmentMap& evidence,
                           int n_query, int n_evidence) {
  query.clear();
  evidence.clear();
  std::vector<VarId> ids;
  for (VarId v = 0; v < vars.size(); ++v)
    if (vars[v].kind == VarKind::Discrete) ids.push_back(v);
  std::shuffle(ids.begin(), ids.end(), rng);
  int nq = std::min<int>(n_query, static_cast<int>(ids.size()));
  int ne = std::min<int>(n_evidence, static_cast<int>(ids.size()) - nq);
  for (int i = 0; i < nq; ++i) {
    const Variable& v = vars[ids[i]];
    query[v.name] = v.domain[rng() % v.domain.size()];
  }
  for (int i = nq; i < nq + ne; ++i) {
    const Variable& v = vars[ids[i]];
    evidence[v.name] = v.domain[rng() % v.domain.size()];
  }
}

std::string serialize_bif(const Network& net) {
  std::ostringstream os;
  os << "network random {\n}\n";
  for (VarId v = 0; v < net.vars.size(); ++v) {
    const Variable& var = net.vars[v];
    os << "variable " << var.name << " {\n  type discrete [ "
       << var.domain.size() << " ] { ";
    for (size_t i = 0; i < var.domain.size(); ++i)
      os << (i ? ", " : "") << var.domain[i];
    os << " };\n}\n";
  }
  char buf[40];
  auto fmt = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (VarId v = 0; v < net.vars.size(); ++v) {
    const Variable& var = net.vars[v];
    os << "probability ( " << var.name;
    if (!net.parents[v].empty()) {
      os << " | ";
      for (size_t i = 0; i < net.parents[v].size(); ++i)
        os << (i ? ", " : "") << net.vars[net.parents[v][i]].name;
    }
    os << " ) {\n";
    int rows = net.row_count(v);
    const auto& cpd = std::get<TabularCpd>(net.cpds[v]);
    if (net.parents[v].empty()) {
      os << "  table ";
      for (size_t k = 0; k < var.domain.size(); ++k)
        os << (k ? ", " : "") << fmt(mass_at(cpd.rows[0], static_cast<int>(k)));
      os << ";\n";
    } else {
      for (int r = 0; r < rows; ++r) {
        std::vector<int> vals(net.parents[v].size());
        int rem = r;
        for (int j = static_cast<int>(vals.size()) - 1; j >= 0; --j) {
          int c = static_cast<int>(net.vars[net.parents[v][j]].domain.size());
          vals[j] = rem % c;
          rem /= c;
        }
        os << "  (";
        for (size_t j = 0; j < vals.size(); ++j)
          os << (j ? ", " : "") << net.vars[net.parents[v][j]].domain[vals[j]];
        os << ") ";
        for (size_t k = 0; k < var.domain.size(); ++k)
          os << (k ? ", " : "") << fmt(mass_at(cpd.rows[r], static_cast<int>(k)));
        os << ";\n";
      }
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace testsup
