#include <algorithm>
#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace cslw;

namespace {

std::vector<std::string> names_of(const VariableTable& vars,
                                  const std::vector<VarId>& ids) {
  std::vector<std::string> out;
  for (VarId v : ids) out.push_back(vars[v].name);
  return out;
}

// Independent d-separation oracle over simple trails. CPD-requisite(v) iff a
// dummy parent of v is d-connected to some query variable given the evidence.
struct TrailOracle {
  const Dag& dag;
  std::vector<bool> observed;
  std::vector<bool> anc_evidence;  // v is evidence or has an observed descendant

  TrailOracle(const Dag& d, const std::vector<bool>& obs) : dag(d), observed(obs) {
    int n = (int)dag.parents.size();
    anc_evidence = observed;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int v = 0; v < n; ++v)
        if (!anc_evidence[v])
          for (VarId c : dag.children[v])
            if (anc_evidence[c]) {
              anc_evidence[v] = true;
              changed = true;
            }
    }
  }

  // active simple trail from `from` to any target; `arrived_up` = the edge
  // into `from` points at it (we came from a child or started at the dummy)
  bool search(VarId from, bool arrived_up, const std::set<VarId>& targets,
              std::vector<bool>& on_path) const {
    if (targets.count(from)) return true;
    on_path[from] = true;
    bool ok = false;
    // continue through `from` as a non-collider or collider as appropriate
    // upward moves: from -> parent (edge parent->from traversed against arrows)
    for (VarId p : dag.parents[from]) {
      if (ok || on_path[p]) continue;
      bool collider = arrived_up;  // ->from<- needs an arrow in on both sides
      bool open = collider ? anc_evidence[from] : !observed[from];
      if (open && !ok) ok = search(p, false, targets, on_path);
    }
    for (VarId c : dag.children[from]) {
      if (ok || on_path[c]) continue;
      bool open = !observed[from];  // tail-to-tail or head-to-tail
      if (open && !ok) ok = search(c, true, targets, on_path);
    }
    on_path[from] = false;
    return ok;
  }

  bool cpd_requisite(VarId v, const std::set<VarId>& query) const {
    // dummy parent enters v pointing at it, i.e. the first hop arrives "up"
    std::vector<bool> on_path(dag.parents.size(), false);
    return search(v, true, query, on_path);
  }
};

}  // namespace

TEST_SUITE("bayesball") {
  TEST_CASE("figure-1 partition matches the worked example") {
    RuleProgram prog = load_dcp(testsup::model_path("figure1.dcp"));
    AssignmentMap query{{"e", "1"}};
    AssignmentMap evidence{{"d", "1"}, {"f", "1"}, {"g", "0"}, {"h", "1"}};
    RequisitePartition part = classify_requisite(prog, query, evidence);

    CHECK(names_of(prog.vars, part.query) == std::vector<std::string>{"e"});
    CHECK(names_of(prog.vars, part.diagnostic_evidence) ==
          std::vector<std::string>{"f", "g", "h"});
    CHECK(names_of(prog.vars, part.predictive_evidence) ==
          std::vector<std::string>{"d"});
    CHECK(names_of(prog.vars, part.requisite_unobserved) ==
          std::vector<std::string>{"a", "b", "c"});
    CHECK(part.irrelevant.empty());
  }

  TEST_CASE("disconnected evidence is non-requisite") {
    // two islands: x -> y and a -> b(observed)
    Network net;
    for (const char* n : {"x", "y", "a", "b"}) {
      Variable v;
      v.name = n;
      v.domain = {"0", "1"};
      net.vars.add(std::move(v));
    }
    net.parents = {{}, {0}, {}, {2}};
    net.cpds.push_back(TabularCpd{{DiscreteDist{{0.5, 0.5}}}});
    net.cpds.push_back(TabularCpd{{DiscreteDist{{0.4, 0.6}}, DiscreteDist{{0.1, 0.9}}}});
    net.cpds.push_back(TabularCpd{{DiscreteDist{{0.5, 0.5}}}});
    net.cpds.push_back(TabularCpd{{DiscreteDist{{0.4, 0.6}}, DiscreteDist{{0.1, 0.9}}}});

    RequisitePartition part = classify_requisite(net, {{"x", "1"}}, {{"b", "0"}});
    CHECK(part.diagnostic_evidence.empty());
    CHECK(part.predictive_evidence.empty());
    CHECK(names_of(net.vars, part.irrelevant) ==
          std::vector<std::string>{"a", "b", "y"});
    CHECK(part.requisite_unobserved.empty());  // x is the query, alone
  }

  TEST_CASE("partition agrees with a trail-enumeration d-separation oracle") {
    Rng rng(909);
    int checked = 0;
    for (int trial = 0; trial < 120; ++trial) {
      Network net = testsup::random_network(rng, 4 + (int)(rng() % 7), 3, 2, trial % 2);
      AssignmentMap query, evidence;
      testsup::random_query_evidence(rng, net.vars, query, evidence, 1,
                                     1 + (int)(rng() % 3));
      if (query.empty()) continue;
      RequisitePartition part = classify_requisite(net, query, evidence);

      Dag dag = dag_of(net);
      int n = net.vars.size();
      std::vector<bool> observed(n, false);
      std::set<VarId> qset;
      for (const auto& [name, _] : evidence) observed[net.vars.require(name)] = true;
      for (const auto& [name, _] : query) qset.insert(net.vars.require(name));
      TrailOracle oracle(dag, observed);

      for (VarId v = 0; v < n; ++v) {
        bool top = oracle.cpd_requisite(v, qset);
        bool is_query = qset.count(v) > 0;
        if (is_query) continue;
        if (observed[v]) {
          CHECK_MESSAGE(part.is_diagnostic[v] == top,
                        "var " << net.vars[v].name << " trial " << trial);
          if (!top) {
            // predictive iff some top-marked variable lists it as a parent
            bool parent_of_req = false;
            for (VarId u = 0; u < n; ++u) {
              bool u_top = qset.count(u) ? true : false;
              if (!u_top && !observed[u]) u_top = part.is_unobserved_requisite[u];
              if (!u_top && observed[u]) u_top = part.is_diagnostic[u];
              if (u_top)
                for (VarId p : dag.parents[u])
                  if (p == v) parent_of_req = true;
            }
            CHECK(part.is_predictive[v] == parent_of_req);
          }
        } else {
          CHECK_MESSAGE(part.is_unobserved_requisite[v] == top,
                        "var " << net.vars[v].name << " trial " << trial);
        }
        ++checked;
      }
    }
    CHECK(checked > 500);
  }

  TEST_CASE("basis of figure-1 residual evidence") {
    RuleProgram prog = load_dcp(testsup::model_path("figure1.dcp"));
    AssignmentMap query{{"e", "1"}};
    AssignmentMap evidence{{"d", "1"}, {"f", "1"}, {"g", "0"}, {"h", "1"}};
    RequisitePartition part = classify_requisite(prog, query, evidence);
    Dag dag = dag_of(prog);

    auto basis_names = [&](std::initializer_list<const char*> targets) {
      std::vector<VarId> ids;
      for (const char* t : targets) ids.push_back(prog.vars.require(t));
      return names_of(prog.vars, basis_of(prog.vars, dag, part, ids));
    };
    CHECK(basis_names({"f"}) == std::vector<std::string>{"b"});
    CHECK(basis_names({"h"}) == std::vector<std::string>{"b"});
    CHECK(basis_names({"g"}) == std::vector<std::string>{"c"});
    CHECK(basis_names({"f", "g", "h"}) == std::vector<std::string>{"b", "c"});
    // d is observed: walking from f stops at b because b's parent d blocks
    CHECK(basis_names({"f", "h"}) == std::vector<std::string>{"b"});
  }

  TEST_CASE("root evidence contributes nothing to a basis") {
    Network net = load_bif(testsup::model_path("supplement.bif"));
    RequisitePartition part = classify_requisite(net, {{"e", "1"}}, {{"a", "1"}});
    Dag dag = dag_of(net);
    CHECK(basis_of(net.vars, dag, part, {net.vars.require("a")}).empty());
  }

  TEST_CASE("basis equals brute-force directed-path search on random nets") {
    Rng rng(3131);
    for (int trial = 0; trial < 80; ++trial) {
      Network net = testsup::random_network(rng, 4 + (int)(rng() % 7), 3, 2, true);
      AssignmentMap query, evidence;
      testsup::random_query_evidence(rng, net.vars, query, evidence, 1, 2);
      if (query.empty() || evidence.empty()) continue;
      RequisitePartition part = classify_requisite(net, query, evidence);
      if (part.diagnostic_evidence.empty()) continue;
      Dag dag = dag_of(net);

      std::vector<VarId> got =
          basis_of(net.vars, dag, part, part.diagnostic_evidence);

      // oracle: u in basis iff u is unobserved requisite (or query) and some
      // directed path u -> ... -> e exists whose intermediates are all
      // unobserved requisite
      int n = net.vars.size();
      std::set<VarId> targets(part.diagnostic_evidence.begin(),
                              part.diagnostic_evidence.end());
      std::vector<VarId> want;
      for (VarId u = 0; u < n; ++u) {
        if (!(part.is_unobserved_requisite[u] || part.is_query[u])) continue;
        // DFS through unobserved requisite intermediates
        std::vector<bool> seen(n, false);
        std::vector<VarId> stack{u};
        seen[u] = true;
        bool hit = false;
        while (!stack.empty() && !hit) {
          VarId x = stack.back();
          stack.pop_back();
          for (VarId c : dag.children[x]) {
            if (targets.count(c)) hit = true;
            if (seen[c]) continue;
            seen[c] = true;
            if (part.is_unobserved_requisite[c] || part.is_query[c])
              stack.push_back(c);
          }
        }
        if (hit) want.push_back(u);
      }
      std::sort(want.begin(), want.end(), [&](VarId a, VarId b) {
        return net.vars[a].name < net.vars[b].name;
      });
      CHECK(got == want);
    }
  }

  TEST_CASE("safety: worked example and its unsafe variant") {
    RuleProgram prog = load_dcp(testsup::model_path("figure1.dcp"));
    AssignmentMap query{{"e", "1"}};
    AssignmentMap evidence{{"d", "1"}, {"f", "1"}, {"g", "0"}, {"h", "1"}};
    RequisitePartition part = classify_requisite(prog, query, evidence);
    Dag dag = dag_of(prog);
    VarId a = prog.vars.require("a"), b = prog.vars.require("b"),
          e = prog.vars.require("e"), f = prog.vars.require("f"),
          g = prog.vars.require("g"), h = prog.vars.require("h");

    // a=1 context: only a and the query sampled; f,g,h all residual
    ContextView safe;
    safe.assigned_unobserved = {a, e};
    safe.residual_evidence = {f, g, h};
    CHECK(safety_witness(prog.vars, dag, part, safe) == -1);
    CHECK(is_safe(prog.vars, dag, part, safe));

    // a=0 context assigns b; f's basis {b} is then assigned -> unsafe
    ContextView unsafe;
    unsafe.assigned_unobserved = {a, b, e};
    unsafe.residual_evidence = {f, g, h};
    CHECK(safety_witness(prog.vars, dag, part, unsafe) == b);
    CHECK_FALSE(is_safe(prog.vars, dag, part, unsafe));

    ContextView empty;
    CHECK(is_safe(prog.vars, dag, part, empty));
  }
}
