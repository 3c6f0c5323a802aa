#include "cslw/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cslw/engine.hpp"

namespace cslw {

namespace {

void require_discrete(const VariableTable& vars, const char* what) {
  for (const Variable& v : vars)
    if (v.kind == VarKind::Continuous)
      throw ModelError(std::string(what) + " requires a discrete model ('" +
                       v.name + "' is continuous)");
}

std::size_t joint_size(const VariableTable& vars, const std::vector<VarId>& free,
                       std::size_t cap) {
  std::size_t total = 1;
  for (VarId v : free) {
    total *= vars[v].domain.size();
    if (total > cap)
      throw Error("joint enumeration needs " + std::to_string(total) +
                  "+ states, cap is " + std::to_string(cap));
  }
  return total;
}

// iterate all joint assignments of `free` inside `full`
template <class Fn>
void for_each_joint(const VariableTable& vars, const std::vector<VarId>& free,
                    std::vector<int>& full, Fn&& fn) {
  for (VarId v : free) full[v] = 0;
  while (true) {
    fn(full);
    size_t i = 0;
    for (; i < free.size(); ++i) {
      VarId v = free[i];
      if (++full[v] < static_cast<int>(vars[v].domain.size())) break;
      full[v] = 0;
    }
    if (i == free.size()) break;
  }
}

struct JointSetup {
  std::vector<VarId> free;
  std::vector<int> full;
  std::vector<std::pair<VarId, int>> query_vals;
};

JointSetup joint_setup(const VariableTable& vars, const AssignmentMap& query,
                       const AssignmentMap& evidence, std::size_t cap) {
  BoundAssignment q = bind_assignment(vars, query);
  BoundAssignment ev = bind_assignment(vars, evidence);
  for (auto& [v, _] : q.items)
    if (ev.has(v))
      throw ModelError("query variable '" + vars[v].name + "' is observed");

  JointSetup s;
  s.full.assign(vars.size(), 0);
  for (VarId v = 0; v < vars.size(); ++v) {
    if (ev.has(v))
      s.full[v] = vindex(*ev.value[v]);
    else
      s.free.push_back(v);
  }
  for (auto& [v, val] : q.items) s.query_vals.emplace_back(v, vindex(val));
  joint_size(vars, s.free, cap);
  return s;
}

double ratio_or_throw(const KahanSum& num, const KahanSum& den) {
  if (den.value() == 0.0) throw Error("evidence has probability zero");
  return num.value() / den.value();
}

int firing_rule_at(const RuleProgram& prog, VarId v, const std::vector<int>& full) {
  int firing = -1;
  for (int rid : prog.head_rules[v]) {
    bool fires = true;
    for (const Atom& a : prog.rules[rid].body)
      if (full[a.var] != vindex(a.value)) {
        fires = false;
        break;
      }
    if (!fires) continue;
    if (firing >= 0)
      throw ModelError("rules of '" + prog.vars[v].name + "' are not exclusive");
    firing = rid;
  }
  if (firing < 0)
    throw ModelError("rules of '" + prog.vars[v].name + "' are not exhaustive");
  return firing;
}

}  // namespace

double enumerate_joint(const Network& net, const AssignmentMap& query,
                       const AssignmentMap& evidence, std::size_t cap) {
  JointSetup s = joint_setup(net.vars, query, evidence, cap);
  KahanSum num, den;
  for_each_joint(net.vars, s.free, s.full, [&](const std::vector<int>& full) {
    double p = 1.0;
    for (VarId v = 0; v < net.vars.size(); ++v)
      p *= mass_at(net.dist_at(v, full), full[v]);
    den.add(p);
    for (auto& [v, val] : s.query_vals)
      if (full[v] != val) return;
    num.add(p);
  });
  return ratio_or_throw(num, den);
}

double enumerate_joint(const RuleProgram& prog, const AssignmentMap& query,
                       const AssignmentMap& evidence, std::size_t cap) {
  require_discrete(prog.vars, "joint enumeration");
  JointSetup s = joint_setup(prog.vars, query, evidence, cap);
  KahanSum num, den;
  for_each_joint(prog.vars, s.free, s.full, [&](const std::vector<int>& full) {
    double p = 1.0;
    for (VarId v = 0; v < prog.vars.size(); ++v)
      p *= mass_at(prog.rules[firing_rule_at(prog, v, full)].dist, full[v]);
    den.add(p);
    for (auto& [v, val] : s.query_vals)
      if (full[v] != val) return;
    num.add(p);
  });
  return ratio_or_throw(num, den);
}

// ------------------------------------------------- variable elimination ----

namespace {

struct Factor {
  std::vector<VarId> scope;  // ascending ids
  std::vector<int> card;
  std::vector<double> table;  // row-major, last scope var fastest

  double& at(const std::vector<int>& full) {
    size_t idx = 0;
    for (size_t i = 0; i < scope.size(); ++i) idx = idx * card[i] + full[scope[i]];
    return table[idx];
  }
};

Factor multiply_all(const std::vector<Factor>& fs, const VariableTable& vars,
                    std::size_t& budget) {
  std::set<VarId> scope_set;
  for (const auto& f : fs) scope_set.insert(f.scope.begin(), f.scope.end());
  Factor out;
  out.scope.assign(scope_set.begin(), scope_set.end());
  std::size_t size = 1;
  for (VarId v : out.scope) {
    out.card.push_back(static_cast<int>(vars[v].domain.size()));
    size *= out.card.back();
  }
  if (size > budget) throw Error("elimination budget exceeded");
  budget -= size;
  out.table.assign(size, 1.0);

  std::vector<int> full(vars.size(), 0);
  std::vector<int> odo(out.scope.size(), 0);
  for (size_t flat = 0; flat < size; ++flat) {
    for (size_t i = 0; i < out.scope.size(); ++i) full[out.scope[i]] = odo[i];
    double p = 1.0;
    for (const auto& f : fs) {
      size_t idx = 0;
      for (size_t i = 0; i < f.scope.size(); ++i)
        idx = idx * f.card[i] + full[f.scope[i]];
      p *= f.table[idx];
    }
    out.table[flat] = p;
    for (int i = static_cast<int>(odo.size()) - 1; i >= 0; --i) {
      if (++odo[i] < out.card[i]) break;
      odo[i] = 0;
    }
  }
  return out;
}

Factor sum_out(const Factor& f, VarId v, const VariableTable& vars,
               std::size_t& budget) {
  Factor out;
  int vi = -1;
  for (size_t i = 0; i < f.scope.size(); ++i) {
    if (f.scope[i] == v) {
      vi = static_cast<int>(i);
      continue;
    }
    out.scope.push_back(f.scope[i]);
    out.card.push_back(f.card[i]);
  }
  std::size_t size = 1;
  for (int c : out.card) size *= c;
  if (size > budget) throw Error("elimination budget exceeded");
  budget -= size;
  out.table.assign(size, 0.0);

  std::vector<int> odo(f.scope.size(), 0);
  for (size_t flat = 0; flat < f.table.size(); ++flat) {
    size_t rid = 0;
    for (size_t i = 0; i < f.scope.size(); ++i)
      if (static_cast<int>(i) != vi) rid = rid * f.card[i] + odo[i];
    out.table[rid] += f.table[flat];
    for (int i = static_cast<int>(odo.size()) - 1; i >= 0; --i) {
      if (++odo[i] < f.card[i]) break;
      odo[i] = 0;
    }
  }
  return out;
}

}  // namespace

double variable_elimination(const Network& net, const AssignmentMap& query,
                            const AssignmentMap& evidence, std::size_t budget) {
  BoundAssignment q = bind_assignment(net.vars, query);
  BoundAssignment ev = bind_assignment(net.vars, evidence);
  for (auto& [v, _] : q.items)
    if (ev.has(v))
      throw ModelError("query variable '" + net.vars[v].name + "' is observed");

  int n = net.vars.size();
  std::vector<Factor> factors;
  std::vector<int> full(n, 0);
  for (VarId v = 0; v < n; ++v) {
    Factor f;
    std::set<VarId> scope_set;
    if (!ev.has(v)) scope_set.insert(v);
    for (VarId p : net.parents[v])
      if (!ev.has(p)) scope_set.insert(p);
    f.scope.assign(scope_set.begin(), scope_set.end());
    std::size_t size = 1;
    for (VarId s : f.scope) {
      f.card.push_back(static_cast<int>(net.vars[s].domain.size()));
      size *= f.card.back();
    }
    if (size > budget) throw Error("elimination budget exceeded");
    budget -= size;
    f.table.assign(size, 0.0);

    for (VarId e = 0; e < n; ++e)
      if (ev.has(e)) full[e] = vindex(*ev.value[e]);
    std::vector<int> odo(f.scope.size(), 0);
    for (size_t flat = 0; flat < size; ++flat) {
      for (size_t i = 0; i < f.scope.size(); ++i) full[f.scope[i]] = odo[i];
      int own = ev.has(v) ? vindex(*ev.value[v]) : full[v];
      f.table[flat] = mass_at(net.dist_at(v, full), own);
      for (int i = static_cast<int>(odo.size()) - 1; i >= 0; --i) {
        if (++odo[i] < f.card[i]) break;
        odo[i] = 0;
      }
    }
    factors.push_back(std::move(f));
  }

  // min-fill elimination order over the interaction graph, name tie-break
  std::set<VarId> remaining;
  for (VarId v = 0; v < n; ++v)
    if (!ev.has(v) && !q.has(v)) remaining.insert(v);

  std::vector<std::set<VarId>> nbr(n);
  auto connect = [&](const std::vector<VarId>& scope) {
    for (VarId a : scope)
      for (VarId b : scope)
        if (a != b) nbr[a].insert(b);
  };
  for (const auto& f : factors) connect(f.scope);

  while (!remaining.empty()) {
    VarId best = -1;
    long best_fill = -1;
    for (VarId v : remaining) {
      std::vector<VarId> ns(nbr[v].begin(), nbr[v].end());
      long fill = 0;
      for (size_t i = 0; i < ns.size(); ++i)
        for (size_t j = i + 1; j < ns.size(); ++j)
          if (!nbr[ns[i]].count(ns[j])) ++fill;
      if (best < 0 || fill < best_fill ||
          (fill == best_fill && net.vars[v].name < net.vars[best].name)) {
        best = v;
        best_fill = fill;
      }
    }

    std::vector<Factor> touched, rest;
    for (auto& f : factors) {
      if (std::find(f.scope.begin(), f.scope.end(), best) != f.scope.end())
        touched.push_back(std::move(f));
      else
        rest.push_back(std::move(f));
    }
    Factor prod = multiply_all(touched, net.vars, budget);
    rest.push_back(sum_out(prod, best, net.vars, budget));
    factors = std::move(rest);

    for (VarId a : nbr[best]) {
      nbr[a].erase(best);
      for (VarId b : nbr[best])
        if (a != b) nbr[a].insert(b);
    }
    nbr[best].clear();
    remaining.erase(best);
  }

  Factor joint = multiply_all(factors, net.vars, budget);
  KahanSum den;
  for (double p : joint.table) den.add(p);
  for (auto& [v, val] : q.items) full[v] = vindex(val);
  double num = joint.table.empty() ? 0.0 : joint.at(full);
  KahanSum num_sum;
  num_sum.add(num);
  return ratio_or_throw(num_sum, den);
}

// ------------------------------------------------------- exact weights ----

double expected_weight_exact(const RuleProgram& prog,
                             const RequisitePartition& part,
                             const BoundAssignment& evidence,
                             const std::vector<VarId>& subset) {
  if (subset.empty()) return 1.0;
  require_discrete(prog.vars, "exact weight expectation");
  std::vector<VarId> basis =
      basis_of(prog.vars, dag_of(prog), part, subset);

  std::vector<int> full(prog.vars.size(), -1);
  for (VarId v = 0; v < prog.vars.size(); ++v)
    if (evidence.has(v)) full[v] = vindex(*evidence.value[v]);

  joint_size(prog.vars, basis, std::size_t{1} << 22);

  std::vector<VarId> product_over = basis;
  for (VarId e : subset) product_over.push_back(e);

  KahanSum sum;
  std::vector<int> scratch = full;
  for_each_joint(prog.vars, basis, scratch, [&](const std::vector<int>& state) {
    double p = 1.0;
    for (VarId u : product_over) {
      int rid = firing_rule_at(prog, u, state);
      p *= mass_at(prog.rules[rid].dist, state[u]);
    }
    sum.add(p);
  });
  return sum.value();
}

// ------------------------------------------------- exhaustive branching ----

namespace {

// Replays a scripted prefix of discrete choices, then takes branch 0 and
// records how many options every fresh choice point had. Depth-first
// enumeration of all simulation paths re-runs the simulation once per leaf.
class ScriptChooser : public Chooser {
 public:
  std::vector<std::pair<int, int>> script;  // (choice, n options)
  size_t pos = 0;
  double path_prob = 1.0;

  int choose_index(const Distribution&, std::span<const double> pmf) override {
    int choice;
    if (pos < script.size()) {
      choice = script[pos].first;
    } else {
      choice = 0;
      script.emplace_back(0, static_cast<int>(pmf.size()));
    }
    path_prob *= pmf[choice];
    ++pos;
    return choice;
  }

  double choose_real(const Gaussian&) override {
    throw ModelError("exhaustive enumeration requires a discrete model");
  }
};

}  // namespace

double exact_contextual_sum(const RuleProgram& prog, const AssignmentMap& query,
                            const AssignmentMap& evidence, std::size_t leaf_cap) {
  require_discrete(prog.vars, "exhaustive contextual enumeration");
  BoundAssignment ev = bind_assignment(prog.vars, evidence);
  RequisitePartition part = classify_requisite(prog, query, evidence);
  Simulator sim(prog, ev, query_atoms(prog, query));

  std::map<std::vector<VarId>, double> expectation_cache;
  auto residual_expect = [&](std::vector<VarId> residual) {
    std::sort(residual.begin(), residual.end());
    auto it = expectation_cache.find(residual);
    if (it != expectation_cache.end()) return it->second;
    double r = expected_weight_exact(prog, part, ev, residual);
    expectation_cache.emplace(std::move(residual), r);
    return r;
  };

  KahanSum num, den;
  std::vector<std::pair<int, int>> prefix;
  std::size_t leaves = 0;
  while (true) {
    if (++leaves > leaf_cap) throw Error("contextual enumeration exceeds cap");
    ScriptChooser chooser;
    chooser.script = prefix;
    SampleRecord rec = sim.run(chooser);

    double w = chooser.path_prob;
    for (auto& [v, wv] : rec.partial_weights) w *= wv;
    std::vector<VarId> residual;
    {
      std::vector<bool> weighted(prog.vars.size(), false);
      for (auto& [v, _] : rec.partial_weights) weighted[v] = true;
      for (VarId e : part.diagnostic_evidence)
        if (!weighted[e]) residual.push_back(e);
    }
    w *= residual_expect(std::move(residual));
    den.add(w);
    if (rec.indicator) num.add(w);

    // backtrack to the deepest choice point with branches left
    prefix = std::move(chooser.script);
    while (!prefix.empty() && prefix.back().first + 1 >= prefix.back().second)
      prefix.pop_back();
    if (prefix.empty()) break;
    ++prefix.back().first;
  }
  if (den.value() == 0.0) throw Error("evidence has probability zero");
  return num.value() / den.value();
}

}  // namespace cslw
