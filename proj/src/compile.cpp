#include "cslw/compile.hpp"

#include <algorithm>
#include <cmath>

namespace cslw {

namespace {

std::vector<double> row_probs(const Distribution& d, int dom) {
  if (auto* b = std::get_if<Bernoulli>(&d)) return {1.0 - b->p, b->p};
  if (auto* disc = std::get_if<DiscreteDist>(&d)) return disc->probs;
  throw ModelError("continuous distribution in a tabular CPD");
  (void)dom;
}

// value of each parent at a given row index (rightmost parent fastest)
std::vector<int> row_values(const Network& net, VarId v, int row) {
  const auto& ps = net.parents[v];
  std::vector<int> vals(ps.size());
  for (int i = static_cast<int>(ps.size()) - 1; i >= 0; --i) {
    int dom = static_cast<int>(net.vars[ps[i]].domain.size());
    vals[i] = row % dom;
    row /= dom;
  }
  return vals;
}

bool rows_agree(const std::vector<std::vector<double>>& rows,
                const std::vector<int>& members, double tol) {
  const auto& first = rows[members.front()];
  for (size_t i = 1; i < members.size(); ++i)
    for (size_t k = 0; k < first.size(); ++k)
      if (std::abs(rows[members[i]][k] - first[k]) > tol) return false;
  return true;
}

Distribution canonical_leaf(const Variable& head, const std::vector<double>& probs) {
  if (head.domain == std::vector<std::string>{"0", "1"}) return Bernoulli{probs[1]};
  return DiscreteDist{probs};
}

struct TreeBuilder {
  const Network& net;
  VarId v;
  double tol;
  std::vector<std::vector<double>> rows;          // full CPD
  std::vector<std::vector<int>> values;           // per row, parent values
  int leaves = 0;

  TreeCpdNode build(std::vector<int> members, std::vector<int> free_parents) {
    if (rows_agree(rows, members, tol) || free_parents.empty()) {
      TreeCpdNode leaf;
      leaf.leaf = canonical_leaf(net.vars[v], rows[members.front()]);
      ++leaves;
      return leaf;
    }

    // pick the split whose children are most often already constant
    int best = -1, best_constant = -1;
    std::vector<std::vector<std::vector<int>>> groups(free_parents.size());
    for (size_t pi = 0; pi < free_parents.size(); ++pi) {
      int p = free_parents[pi];
      int dom = static_cast<int>(net.vars[net.parents[v][p]].domain.size());
      groups[pi].assign(dom, {});
      for (int m : members) groups[pi][values[m][p]].push_back(m);
      int constant = 0;
      for (const auto& g : groups[pi])
        if (!g.empty() && rows_agree(rows, g, tol)) ++constant;
      bool better = constant > best_constant;
      if (constant == best_constant) {
        const auto& cand = net.vars[net.parents[v][free_parents[pi]]].name;
        const auto& cur = net.vars[net.parents[v][free_parents[best]]].name;
        better = cand < cur;
      }
      if (better) {
        best = static_cast<int>(pi);
        best_constant = constant;
      }
    }

    std::vector<int> rest;
    for (size_t pi = 0; pi < free_parents.size(); ++pi)
      if (static_cast<int>(pi) != best) rest.push_back(free_parents[pi]);

    TreeCpdNode node;
    node.split = net.parents[v][free_parents[best]];
    for (auto& g : groups[best]) {
      if (g.empty()) g.push_back(members.front());  // not reachable from a full table
      node.children.push_back(build(std::move(g), rest));
    }
    return node;
  }
};

}  // namespace

TreeCpd table_to_tree(const Network& net, VarId v, double tol) {
  int n_rows = net.row_count(v);
  int dom = static_cast<int>(net.vars[v].domain.size());

  TreeBuilder b{net, v, tol, {}, {}};
  b.rows.reserve(n_rows);
  b.values.reserve(n_rows);
  std::vector<int> full(net.vars.size(), 0);
  for (int r = 0; r < n_rows; ++r) {
    b.values.push_back(row_values(net, v, r));
    for (size_t i = 0; i < net.parents[v].size(); ++i)
      full[net.parents[v][i]] = b.values.back()[i];
    b.rows.push_back(row_probs(net.dist_at(v, full), dom));
  }

  std::vector<int> members(n_rows), free_parents(net.parents[v].size());
  for (int r = 0; r < n_rows; ++r) members[r] = r;
  for (size_t i = 0; i < free_parents.size(); ++i) free_parents[i] = (int)i;

  TreeCpd tree;
  tree.root = b.build(std::move(members), std::move(free_parents));
  return tree;
}

std::vector<Rule> tree_to_rules(const Network& net, VarId v, const TreeCpd& tree) {
  std::vector<Rule> out;
  std::vector<Atom> path;
  auto walk = [&](auto&& self, const TreeCpdNode& node) -> void {
    if (node.is_leaf()) {
      Rule r;
      r.head = v;
      r.dist = node.leaf;
      r.body = path;
      out.push_back(std::move(r));
      return;
    }
    for (int val = 0; val < static_cast<int>(node.children.size()); ++val) {
      path.push_back(Atom{node.split, Cmp::Eq, Value{val}});
      self(self, node.children[val]);
      path.pop_back();
    }
  };
  walk(walk, tree.root);
  return out;
}

std::vector<Rule> table_to_rules(const Network& net, VarId v) {
  int n_rows = net.row_count(v);
  int dom = static_cast<int>(net.vars[v].domain.size());
  std::vector<Rule> out;
  out.reserve(n_rows);
  std::vector<int> full(net.vars.size(), 0);
  for (int r = 0; r < n_rows; ++r) {
    std::vector<int> vals = row_values(net, v, r);
    Rule rule;
    rule.head = v;
    for (size_t i = 0; i < net.parents[v].size(); ++i) {
      rule.body.push_back(Atom{net.parents[v][i], Cmp::Eq, Value{vals[i]}});
      full[net.parents[v][i]] = vals[i];
    }
    rule.dist = canonical_leaf(net.vars[v], row_probs(net.dist_at(v, full), dom));
    out.push_back(std::move(rule));
  }
  return out;
}

RuleProgram network_to_program(const Network& net, CompileMode mode, double tol) {
  RuleProgram prog;
  for (const Variable& v : net.vars) prog.vars.add(v);
  for (VarId v = 0; v < net.vars.size(); ++v) {
    std::vector<Rule> rules = mode == CompileMode::Table
                                  ? table_to_rules(net, v)
                                  : tree_to_rules(net, v, table_to_tree(net, v, tol));
    for (auto& r : rules) prog.rules.push_back(std::move(r));
  }
  prog.finalize();
  return prog;
}

Network program_to_network(const RuleProgram& prog) {
  if (prog.has_continuous())
    throw ModelError("cannot tabulate a program with continuous variables");

  Network net;
  for (const Variable& v : prog.vars) net.vars.add(v);
  net.parents = prog.parents;
  net.cpds.resize(prog.vars.size(), TabularCpd{});

  std::vector<Value> resolved(prog.vars.size(), Value{0});
  for (VarId v = 0; v < prog.vars.size(); ++v) {
    if (prog.head_rules[v].empty())
      throw ModelError("no rules for variable '" + prog.vars[v].name + "'");
    auto& cpd = std::get<TabularCpd>(net.cpds[v]);
    int n_rows = net.row_count(v);
    cpd.rows.reserve(n_rows);
    for (int r = 0; r < n_rows; ++r) {
      std::vector<int> vals = row_values(net, v, r);
      for (size_t i = 0; i < net.parents[v].size(); ++i)
        resolved[net.parents[v][i]] = Value{vals[i]};
      int firing = -1;
      for (int rid : prog.head_rules[v]) {
        bool fires = true;
        for (const Atom& a : prog.rules[rid].body)
          if (!a.holds(resolved[a.var])) {
            fires = false;
            break;
          }
        if (!fires) continue;
        if (firing >= 0)
          throw ModelError("rules " + std::to_string(firing) + " and " +
                           std::to_string(rid) + " of '" + prog.vars[v].name +
                           "' both fire");
        firing = rid;
      }
      if (firing < 0)
        throw ModelError("no rule of '" + prog.vars[v].name +
                         "' fires for some parent assignment");
      cpd.rows.push_back(prog.rules[firing].dist);
    }
  }
  return net;
}

int count_rules(const Network& net, CompileMode mode, double tol) {
  int total = 0;
  for (VarId v = 0; v < net.vars.size(); ++v) {
    if (mode == CompileMode::Table)
      total += net.row_count(v);
    else
      total += static_cast<int>(tree_to_rules(net, v, table_to_tree(net, v, tol)).size());
  }
  return total;
}

}  // namespace cslw
