#include "cslw/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace cslw {

namespace {

const double kPi = 3.14159265358979323846;

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_real(std::string_view s, const std::string& what) {
  double out = 0;
  auto first = s.data();
  auto last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw ModelError("expected a number for " + what + ", got '" +
                     std::string(s) + "'");
  return out;
}

}  // namespace

int Variable::value_index(std::string_view label) const {
  for (size_t i = 0; i < domain.size(); ++i)
    if (domain[i] == label) return static_cast<int>(i);
  return -1;
}

VarId VariableTable::add(Variable v) {
  if (v.name.empty()) throw ModelError("variable with empty name");
  if (index_.count(v.name))
    throw ModelError("duplicate variable '" + v.name + "'");
  VarId id = static_cast<VarId>(vars_.size());
  index_.emplace(v.name, id);
  vars_.push_back(std::move(v));
  return id;
}

std::optional<VarId> VariableTable::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarId VariableTable::require(std::string_view name) const {
  auto id = find(name);
  if (!id) throw ModelError("unknown variable '" + std::string(name) + "'");
  return *id;
}

bool is_continuous(const Distribution& d) {
  return std::holds_alternative<Gaussian>(d);
}

double mass_at(const Distribution& d, int index) {
  if (auto* b = std::get_if<Bernoulli>(&d)) return index == 1 ? b->p : 1.0 - b->p;
  if (auto* disc = std::get_if<DiscreteDist>(&d)) return disc->probs[index];
  throw ModelError("probability mass requested from a continuous distribution");
}

double density_at(const Distribution& d, double x) {
  auto* g = std::get_if<Gaussian>(&d);
  if (!g) throw ModelError("density requested from a discrete distribution");
  double z = (x - g->mean) / g->stddev;
  return std::exp(-0.5 * z * z) / (g->stddev * std::sqrt(2.0 * kPi));
}

double weight_at(const Distribution& d, const Value& v) {
  return is_real(v) ? density_at(d, vreal(v)) : mass_at(d, vindex(v));
}

int domain_size(const Distribution& d) {
  if (std::holds_alternative<Bernoulli>(d)) return 2;
  if (auto* disc = std::get_if<DiscreteDist>(&d))
    return static_cast<int>(disc->probs.size());
  return -1;
}

void check_distribution(const Distribution& d, const Variable& head) {
  if (auto* b = std::get_if<Bernoulli>(&d)) {
    if (!(b->p >= 0.0 && b->p <= 1.0))
      throw ModelError("probability out of range in bernoulli(" +
                       std::to_string(b->p) + ")");
    if (head.kind != VarKind::Discrete || head.domain != std::vector<std::string>{"0", "1"})
      throw ModelError("bernoulli head '" + head.name + "' must have domain {0,1}");
    return;
  }
  if (auto* disc = std::get_if<DiscreteDist>(&d)) {
    if (head.kind != VarKind::Discrete)
      throw ModelError("discrete distribution on continuous head '" + head.name + "'");
    if (disc->probs.size() != head.domain.size())
      throw ModelError("distribution size mismatch for '" + head.name + "'");
    double sum = 0;
    for (double p : disc->probs) {
      if (!(p >= 0.0 && p <= 1.0))
        throw ModelError("probability out of range in distribution of '" +
                         head.name + "'");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ModelError("probabilities of '" + head.name + "' sum to " +
                       std::to_string(sum) + ", expected 1");
    return;
  }
  const auto& g = std::get<Gaussian>(d);
  if (!(g.stddev > 0.0))
    throw ModelError("gaussian stddev must be positive for '" + head.name + "'");
  if (head.kind != VarKind::Continuous)
    throw ModelError("gaussian head '" + head.name + "' must be continuous");
}

bool same_distribution(const Distribution& a, const Distribution& b) {
  if (a.index() != b.index()) return false;
  if (auto* x = std::get_if<Bernoulli>(&a)) return x->p == std::get<Bernoulli>(b).p;
  if (auto* x = std::get_if<DiscreteDist>(&a))
    return x->probs == std::get<DiscreteDist>(b).probs;
  const auto& x = std::get<Gaussian>(a);
  const auto& y = std::get<Gaussian>(b);
  return x.mean == y.mean && x.stddev == y.stddev;
}

std::string_view cmp_token(Cmp c) {
  switch (c) {
    case Cmp::Eq: return "=";
    case Cmp::Lt: return "<";
    case Cmp::Le: return "=<";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
  }
  return "?";
}

bool Atom::holds(const Value& resolved) const {
  if (cmp == Cmp::Eq) return resolved == value;
  double x = vreal(resolved);
  double c = vreal(value);
  switch (cmp) {
    case Cmp::Lt: return x < c;
    case Cmp::Le: return x <= c;
    case Cmp::Gt: return x > c;
    case Cmp::Ge: return x >= c;
    default: return false;
  }
}

void RuleProgram::finalize() {
  int n = vars.size();
  head_rules.assign(n, {});
  body_rules.assign(n, {});
  parents.assign(n, {});
  children.assign(n, {});

  for (const auto& var : vars) {
    if (var.kind == VarKind::Discrete) {
      if (var.domain.empty())
        throw ModelError("discrete variable '" + var.name + "' has empty domain");
      std::set<std::string> uniq(var.domain.begin(), var.domain.end());
      if (uniq.size() != var.domain.size())
        throw ModelError("duplicate domain value for '" + var.name + "'");
    } else if (!var.domain.empty()) {
      throw ModelError("continuous variable '" + var.name + "' cannot have a domain");
    }
  }

  for (int r = 0; r < static_cast<int>(rules.size()); ++r) {
    const Rule& rule = rules[r];
    if (rule.head < 0 || rule.head >= n) throw ModelError("rule with bad head id");
    head_rules[rule.head].push_back(r);
    for (const Atom& a : rule.body) {
      if (a.var < 0 || a.var >= n) throw ModelError("atom with bad variable id");
      const Variable& v = vars[a.var];
      if (v.kind == VarKind::Discrete) {
        if (a.cmp != Cmp::Eq)
          throw ModelError("order comparison on discrete variable '" + v.name + "'");
        if (is_real(a.value) || vindex(a.value) < 0 ||
            vindex(a.value) >= static_cast<int>(v.domain.size()))
          throw ModelError("atom value out of domain for '" + v.name + "'");
      } else if (!is_real(a.value)) {
        throw ModelError("non-numeric comparison on continuous variable '" + v.name + "'");
      }
      if (body_rules[a.var].empty() || body_rules[a.var].back() != r)
        body_rules[a.var].push_back(r);
      auto& ps = parents[rule.head];
      if (std::find(ps.begin(), ps.end(), a.var) == ps.end()) ps.push_back(a.var);
    }
  }

  for (VarId v = 0; v < n; ++v)
    for (VarId p : parents[v]) children[p].push_back(v);
}

bool RuleProgram::has_continuous() const {
  for (const auto& v : vars)
    if (v.kind == VarKind::Continuous) return true;
  return false;
}

std::vector<std::vector<VarId>> Network::children() const {
  std::vector<std::vector<VarId>> ch(vars.size());
  for (VarId v = 0; v < vars.size(); ++v)
    for (VarId p : parents[v]) ch[p].push_back(v);
  return ch;
}

int Network::row_count(VarId v) const {
  int rows = 1;
  for (VarId p : parents[v]) rows *= static_cast<int>(vars[p].domain.size());
  return rows;
}

int Network::row_index(VarId v, const std::vector<int>& full) const {
  int idx = 0;
  for (VarId p : parents[v])
    idx = idx * static_cast<int>(vars[p].domain.size()) + full[p];
  return idx;
}

const Distribution& Network::dist_at(VarId v, const std::vector<int>& full) const {
  if (auto* tab = std::get_if<TabularCpd>(&cpds[v]))
    return tab->rows[row_index(v, full)];
  const TreeCpdNode* node = &std::get<TreeCpd>(cpds[v]).root;
  while (!node->is_leaf()) node = &node->children[full[node->split]];
  return node->leaf;
}

AssignmentMap parse_assignment_list(std::string_view text) {
  AssignmentMap out;
  std::string_view rest = trim(text);
  if (rest.empty()) return out;
  while (true) {
    size_t comma = rest.find(',');
    std::string_view item = trim(rest.substr(0, comma));
    size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 >= item.size())
      throw ParseError("malformed assignment '" + std::string(item) +
                           "', expected name=value", {});
    std::string name(trim(item.substr(0, eq)));
    std::string value(trim(item.substr(eq + 1)));
    if (!out.emplace(name, value).second)
      throw ParseError("variable '" + name + "' assigned twice", {});
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
    if (trim(rest).empty())
      throw ParseError("trailing comma in assignment list", {});
  }
  return out;
}

BoundAssignment bind_assignment(const VariableTable& vars, const AssignmentMap& m) {
  BoundAssignment out;
  out.value.assign(vars.size(), std::nullopt);
  for (const auto& [name, label] : m) {
    VarId id = vars.require(name);
    const Variable& var = vars[id];
    Value v;
    if (var.kind == VarKind::Discrete) {
      int idx = var.value_index(label);
      if (idx < 0)
        throw ModelError("value '" + label + "' not in domain of '" + name + "'");
      v = idx;
    } else {
      v = parse_real(label, "'" + name + "'");
    }
    out.value[id] = v;
    out.items.emplace_back(id, v);
  }
  return out;
}

Dag dag_of(const Network& net) { return Dag{net.parents, net.children()}; }

Dag dag_of(const RuleProgram& prog) { return Dag{prog.parents, prog.children}; }

std::vector<VarId> topological_order(const VariableTable& vars, const Dag& dag) {
  int n = vars.size();
  std::vector<int> indeg(n, 0);
  for (VarId v = 0; v < n; ++v) indeg[v] = static_cast<int>(dag.parents[v].size());

  auto by_name = [&](VarId a, VarId b) { return vars[a].name < vars[b].name; };
  std::set<VarId, decltype(by_name)> ready(by_name);
  for (VarId v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.insert(v);

  std::vector<VarId> order;
  order.reserve(n);
  while (!ready.empty()) {
    VarId v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (VarId c : dag.children[v])
      if (--indeg[c] == 0) ready.insert(c);
  }
  if (static_cast<int>(order.size()) != n) {
    // walk parent links among unfinished nodes until one repeats
    VarId start = 0;
    while (indeg[start] == 0) ++start;
    std::vector<int> seen(n, -1);
    std::vector<VarId> path;
    VarId cur = start;
    while (seen[cur] < 0) {
      seen[cur] = static_cast<int>(path.size());
      path.push_back(cur);
      for (VarId p : dag.parents[cur])
        if (indeg[p] > 0) {
          cur = p;
          break;
        }
    }
    std::string msg = "dependency cycle: ";
    for (size_t i = seen[cur]; i < path.size(); ++i)
      msg += vars[path[i]].name + " <- ";
    msg += vars[cur].name;
    throw ModelError(msg);
  }
  return order;
}

std::string format_value(const Variable& var, const Value& v) {
  if (!is_real(v)) return var.domain[vindex(v)];
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", vreal(v));
  return buf;
}

namespace {

// One axis of the exclusivity search: either the domain of a discrete
// variable, or the interval partition induced by a continuous variable's
// comparison thresholds (points and open intervals, so every atom has a
// constant truth value per cell).
struct WitnessAxis {
  VarId var;
  std::vector<Value> reps;
  std::vector<std::string> labels;
};

WitnessAxis make_axis(const RuleProgram& prog, VarId v,
                      const std::vector<int>& rule_ids) {
  const Variable& var = prog.vars[v];
  WitnessAxis axis{v, {}, {}};
  if (var.kind == VarKind::Discrete) {
    for (int i = 0; i < static_cast<int>(var.domain.size()); ++i) {
      axis.reps.push_back(Value{i});
      axis.labels.push_back(var.name + "=" + var.domain[i]);
    }
    return axis;
  }
  std::set<double> th;
  for (int r : rule_ids)
    for (const Atom& a : prog.rules[r].body)
      if (a.var == v) th.insert(vreal(a.value));
  std::vector<double> ts(th.begin(), th.end());
  auto fmt = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf);
  };
  if (ts.empty()) {
    axis.reps.push_back(Value{0.0});
    axis.labels.push_back(var.name + " in (-inf,inf)");
    return axis;
  }
  axis.reps.push_back(Value{ts.front() - 1.0});
  axis.labels.push_back(var.name + " in (-inf," + fmt(ts.front()) + ")");
  for (size_t i = 0; i < ts.size(); ++i) {
    axis.reps.push_back(Value{ts[i]});
    axis.labels.push_back(var.name + "=" + fmt(ts[i]));
    double hi = i + 1 < ts.size() ? ts[i + 1] : ts[i] + 2.0;
    axis.reps.push_back(Value{(ts[i] + hi) / 2.0});
    axis.labels.push_back(var.name + " in (" + fmt(ts[i]) + "," +
                          (i + 1 < ts.size() ? fmt(ts[i + 1]) : "inf") + ")");
  }
  return axis;
}

}  // namespace

ValidationReport validate_program(const RuleProgram& prog, std::size_t combo_cap) {
  ValidationReport report;
  const int witness_cap = 8;

  for (VarId v = 0; v < prog.vars.size(); ++v)
    if (prog.head_rules[v].empty())
      report.issues.push_back({ValidationIssue::Kind::NoRules, prog.vars[v].name,
                               "no rules define this variable"});

  for (int r = 0; r < static_cast<int>(prog.rules.size()); ++r) {
    try {
      check_distribution(prog.rules[r].dist, prog.vars[prog.rules[r].head]);
    } catch (const ModelError& e) {
      report.issues.push_back({ValidationIssue::Kind::BadDistribution,
                               prog.vars[prog.rules[r].head].name,
                               std::string("rule ") + std::to_string(r) + ": " + e.what(),
                               r});
    }
  }

  try {
    topological_order(prog.vars, dag_of(prog));
  } catch (const ModelError& e) {
    report.issues.push_back({ValidationIssue::Kind::Cycle, "", e.what()});
  }

  for (VarId h = 0; h < prog.vars.size(); ++h) {
    const auto& rule_ids = prog.head_rules[h];
    if (rule_ids.empty()) continue;

    std::vector<VarId> body_vars;
    for (int r : rule_ids)
      for (const Atom& a : prog.rules[r].body)
        if (std::find(body_vars.begin(), body_vars.end(), a.var) == body_vars.end())
          body_vars.push_back(a.var);

    std::vector<WitnessAxis> axes;
    std::size_t combos = 1;
    bool capped = false;
    for (VarId v : body_vars) {
      axes.push_back(make_axis(prog, v, rule_ids));
      combos *= axes.back().reps.size();
      if (combos > combo_cap) {
        capped = true;
        break;
      }
    }
    if (capped) {
      report.issues.push_back(
          {ValidationIssue::Kind::NotChecked, prog.vars[h].name,
           "exclusivity not checked: witness space exceeds cap of " +
               std::to_string(combo_cap)});
      continue;
    }

    std::vector<Value> resolved(prog.vars.size(), Value{0});
    std::vector<size_t> odo(axes.size(), 0);
    int n_overlap = 0, n_uncovered = 0;
    while (true) {
      std::string witness;
      for (size_t i = 0; i < axes.size(); ++i) {
        resolved[axes[i].var] = axes[i].reps[odo[i]];
        if (!witness.empty()) witness += ", ";
        witness += axes[i].labels[odo[i]];
      }
      if (witness.empty()) witness = "(empty body)";

      int first = -1, second = -1;
      for (int r : rule_ids) {
        bool fires = true;
        for (const Atom& a : prog.rules[r].body)
          if (!a.holds(resolved[a.var])) {
            fires = false;
            break;
          }
        if (!fires) continue;
        if (first < 0)
          first = r;
        else if (second < 0)
          second = r;
      }
      if (first < 0 && ++n_uncovered <= witness_cap)
        report.issues.push_back({ValidationIssue::Kind::Uncovered,
                                 prog.vars[h].name, witness});
      if (second >= 0 && ++n_overlap <= witness_cap)
        report.issues.push_back({ValidationIssue::Kind::Overlap, prog.vars[h].name,
                                 witness, first, second});

      size_t i = 0;
      for (; i < axes.size(); ++i) {
        if (++odo[i] < axes[i].reps.size()) break;
        odo[i] = 0;
      }
      if (i == axes.size()) break;
    }
    auto note_extra = [&](int count, const char* what) {
      if (count > witness_cap)
        report.issues.push_back(
            {ValidationIssue::Kind::NotChecked, prog.vars[h].name,
             std::to_string(count - witness_cap) + " further " + what +
                 " witnesses omitted"});
    };
    note_extra(n_uncovered, "uncovered");
    note_extra(n_overlap, "overlap");
  }
  return report;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& issue : issues) {
    switch (issue.kind) {
      case ValidationIssue::Kind::NoRules:
        os << "error: " << issue.variable << ": " << issue.detail << "\n";
        break;
      case ValidationIssue::Kind::Overlap:
        os << "error: " << issue.variable << ": rules " << issue.rule_a << " and "
           << issue.rule_b << " overlap at " << issue.detail << "\n";
        break;
      case ValidationIssue::Kind::Uncovered:
        os << "error: " << issue.variable << ": no rule fires at " << issue.detail
           << "\n";
        break;
      case ValidationIssue::Kind::Cycle:
        os << "error: " << issue.detail << "\n";
        break;
      case ValidationIssue::Kind::BadDistribution:
        os << "error: " << issue.variable << ": " << issue.detail << "\n";
        break;
      case ValidationIssue::Kind::NotChecked:
        os << "note: " << issue.variable << ": " << issue.detail << "\n";
        break;
    }
  }
  return os.str();
}

}  // namespace cslw
