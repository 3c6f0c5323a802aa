#include "cslw/bayesball.hpp"

#include <algorithm>
#include <deque>

namespace cslw {

namespace {

std::vector<VarId> sorted_by_name(const VariableTable& vars, std::vector<VarId> ids) {
  std::sort(ids.begin(), ids.end(), [&](VarId a, VarId b) {
    return vars[a].name < vars[b].name;
  });
  return ids;
}

std::vector<VarId> resolve_names(const VariableTable& vars, const AssignmentMap& m) {
  std::vector<VarId> out;
  for (const auto& [name, _] : m) out.push_back(vars.require(name));
  return out;
}

}  // namespace

RequisitePartition classify_requisite(const VariableTable& vars, const Dag& dag,
                                      const std::vector<VarId>& query,
                                      const std::vector<VarId>& evidence) {
  int n = vars.size();
  std::vector<bool> observed(n, false), queried(n, false);
  for (VarId e : evidence) observed[e] = true;
  for (VarId q : query) {
    if (observed[q])
      throw ModelError("query variable '" + vars[q].name + "' is observed");
    queried[q] = true;
  }

  std::vector<bool> top(n, false), bottom(n, false), visited(n, false);
  // LIFO agenda; parents pushed in body order, children in name order (any
  // processing order reaches the same marks)
  std::vector<std::pair<VarId, bool>> agenda;  // (node, visited from child)
  for (VarId q : query) agenda.emplace_back(q, true);
  auto push_parents = [&](VarId j) {
    for (VarId p : dag.parents[j]) agenda.emplace_back(p, true);
  };
  auto push_children = [&](VarId j) {
    for (VarId c : sorted_by_name(vars, dag.children[j]))
      agenda.emplace_back(c, false);
  };

  while (!agenda.empty()) {
    auto [j, from_child] = agenda.back();
    agenda.pop_back();
    visited[j] = true;
    if (from_child) {
      if (observed[j]) continue;  // a diagnostic look-up, nothing propagates
      if (!top[j]) {
        top[j] = true;
        push_parents(j);
        if (!bottom[j]) {
          bottom[j] = true;
          push_children(j);
        }
      }
    } else {
      if (observed[j]) {
        if (!top[j]) {  // weighted at its observed value
          top[j] = true;
          push_parents(j);
        }
      } else if (!bottom[j]) {
        bottom[j] = true;
        push_children(j);
      }
    }
  }

  RequisitePartition part;
  part.n_vars = n;
  part.is_query = queried;
  part.is_unobserved_requisite.assign(n, false);
  part.is_diagnostic.assign(n, false);
  part.is_predictive.assign(n, false);

  std::vector<VarId> z, ed, ep, other;
  for (VarId v = 0; v < n; ++v) {
    if (queried[v]) continue;
    if (observed[v]) {
      if (top[v]) {
        part.is_diagnostic[v] = true;
        ed.push_back(v);
      } else if (visited[v]) {
        part.is_predictive[v] = true;
        ep.push_back(v);
      } else {
        other.push_back(v);
      }
    } else if (top[v]) {
      part.is_unobserved_requisite[v] = true;
      z.push_back(v);
    } else {
      other.push_back(v);
    }
  }
  part.query = sorted_by_name(vars, query);
  part.requisite_unobserved = sorted_by_name(vars, std::move(z));
  part.diagnostic_evidence = sorted_by_name(vars, std::move(ed));
  part.predictive_evidence = sorted_by_name(vars, std::move(ep));
  part.irrelevant = sorted_by_name(vars, std::move(other));
  return part;
}

RequisitePartition classify_requisite(const Network& net, const AssignmentMap& query,
                                      const AssignmentMap& evidence) {
  return classify_requisite(net.vars, dag_of(net), resolve_names(net.vars, query),
                            resolve_names(net.vars, evidence));
}

RequisitePartition classify_requisite(const RuleProgram& prog,
                                      const AssignmentMap& query,
                                      const AssignmentMap& evidence) {
  return classify_requisite(prog.vars, dag_of(prog), resolve_names(prog.vars, query),
                            resolve_names(prog.vars, evidence));
}

std::vector<VarId> basis_of(const VariableTable& vars, const Dag& dag,
                            const RequisitePartition& part,
                            const std::vector<VarId>& targets) {
  std::vector<bool> in_basis(part.n_vars, false), seen(part.n_vars, false);
  std::vector<VarId> stack;
  for (VarId t : targets) stack.push_back(t);

  while (!stack.empty()) {
    VarId u = stack.back();
    stack.pop_back();
    for (VarId p : dag.parents[u]) {
      if (seen[p]) continue;
      seen[p] = true;
      bool observed = part.is_diagnostic[p] || part.is_predictive[p];
      if (observed) continue;  // an observed ancestor blocks the trail
      bool requisite = part.is_unobserved_requisite[p] || part.is_query[p];
      if (!requisite) continue;  // outside the requisite sub-network
      in_basis[p] = true;
      stack.push_back(p);
    }
  }

  std::vector<VarId> out;
  for (VarId v = 0; v < part.n_vars; ++v)
    if (in_basis[v]) out.push_back(v);
  return sorted_by_name(vars, out);
}

VarId safety_witness(const VariableTable& vars, const Dag& dag,
                     const RequisitePartition& part, const ContextView& ctx) {
  std::vector<bool> assigned(part.n_vars, false);
  for (VarId v : ctx.assigned_unobserved) assigned[v] = true;
  for (VarId b : basis_of(vars, dag, part, ctx.residual_evidence))
    if (assigned[b]) return b;
  return -1;
}

}  // namespace cslw
