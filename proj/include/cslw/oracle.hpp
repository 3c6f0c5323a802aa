#pragma once

#include "cslw/bayesball.hpp"
#include "cslw/model.hpp"

namespace cslw {

// Exact P(query | evidence) by full joint enumeration (discrete only).
// Throws if the free joint space exceeds `cap` states or P(evidence) = 0.
double enumerate_joint(const Network& net, const AssignmentMap& query,
                       const AssignmentMap& evidence,
                       std::size_t cap = std::size_t{1} << 24);
double enumerate_joint(const RuleProgram& prog, const AssignmentMap& query,
                       const AssignmentMap& evidence,
                       std::size_t cap = std::size_t{1} << 24);

// Exact P(query | evidence) by variable elimination, min-fill order with
// name tie-breaks. `budget` caps the total number of table entries created.
double variable_elimination(const Network& net, const AssignmentMap& query,
                            const AssignmentMap& evidence,
                            std::size_t budget = std::size_t{1} << 30);

// Exact expectation of the product of the weights of `subset` (diagnostic
// evidence) under the sampling distribution: sums the product of conditional
// probabilities of subset-and-basis over all joint basis assignments, other
// evidence clamped. Discrete programs only.
double expected_weight_exact(const RuleProgram& prog,
                             const RequisitePartition& part,
                             const BoundAssignment& evidence,
                             const std::vector<VarId>& subset);

// Exact value of the contextual estimator: enumerates every partial
// assignment the simulation can produce (scripted choices instead of random
// draws), weighting each by its path probability, its recorded evidence
// weights, and the exact expectation of its residual block. Must equal the
// other oracles on any valid discrete program.
double exact_contextual_sum(const RuleProgram& prog, const AssignmentMap& query,
                            const AssignmentMap& evidence,
                            std::size_t leaf_cap = std::size_t{1} << 22);

}  // namespace cslw
