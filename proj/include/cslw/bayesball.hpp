#pragma once

#include <vector>

#include "cslw/model.hpp"

namespace cslw {

// Output of the requisite-variable sweep for one (query, evidence) pair.
// Diagnostic evidence is evidence reached from a child (it contributes a
// likelihood weight); predictive evidence is visited but only ever from a
// parent (it is clamped and never weighted).
struct RequisitePartition {
  std::vector<VarId> query;
  std::vector<VarId> requisite_unobserved;   // sampled during simulation
  std::vector<VarId> diagnostic_evidence;    // weighted during simulation
  std::vector<VarId> predictive_evidence;    // clamped only
  std::vector<VarId> irrelevant;             // everything else
  int n_vars = 0;

  std::vector<bool> is_query, is_unobserved_requisite, is_diagnostic,
      is_predictive;
};

// Mark-propagation sweep over the DAG (visit-from-child marks the top of a
// node and schedules its parents; visit-from-parent on an unobserved node
// marks the bottom and schedules its children; evidence visited from a parent
// is marked on top and schedules its parents). Query and evidence variables
// must be disjoint.
RequisitePartition classify_requisite(const VariableTable& vars, const Dag& dag,
                                      const std::vector<VarId>& query,
                                      const std::vector<VarId>& evidence);

RequisitePartition classify_requisite(const Network& net,
                                      const AssignmentMap& query,
                                      const AssignmentMap& evidence);

RequisitePartition classify_requisite(const RuleProgram& prog,
                                      const AssignmentMap& query,
                                      const AssignmentMap& evidence);

// Unobserved ancestors with a directed path to some member of `targets` that
// stays inside the requisite sub-network and passes through no observed
// variable. Result is in name order.
std::vector<VarId> basis_of(const VariableTable& vars, const Dag& dag,
                            const RequisitePartition& part,
                            const std::vector<VarId>& targets);

// A partial simulation outcome viewed against a partition: which requisite
// unobserved variables were assigned, which diagnostic evidence was weighted,
// and what remains residual.
struct ContextView {
  std::vector<VarId> assigned_unobserved;   // query + context variables
  std::vector<VarId> weighted_evidence;
  std::vector<VarId> residual_unobserved;
  std::vector<VarId> residual_evidence;
};

// Safe iff every basis variable of the residual evidence is itself residual
// (so the untouched block is independent of the assigned context given the
// clamped evidence). Returns the first violating variable, or -1 if safe.
VarId safety_witness(const VariableTable& vars, const Dag& dag,
                     const RequisitePartition& part, const ContextView& ctx);

inline bool is_safe(const VariableTable& vars, const Dag& dag,
                    const RequisitePartition& part, const ContextView& ctx) {
  return safety_witness(vars, dag, part, ctx) < 0;
}

}  // namespace cslw
