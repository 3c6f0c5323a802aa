#pragma once

#include "cslw/model.hpp"

namespace cslw {

enum class CompileMode { Table, Tree };

// Greedy top-down merge of a tabular CPD: a partition whose rows all agree
// within `tol` (max absolute parameter difference) becomes a leaf holding the
// partition's first row; otherwise split on the parent that yields the most
// constant child partitions (ties broken by parent name).
TreeCpd table_to_tree(const Network& net, VarId v, double tol = 1e-9);

// One rule per root-to-leaf path; bodies list the path's equality tests in
// split order. Children are visited in domain-value order.
std::vector<Rule> tree_to_rules(const Network& net, VarId v, const TreeCpd& tree);

// One rule per CPD row; bodies fix every parent (parent-list order).
std::vector<Rule> table_to_rules(const Network& net, VarId v);

// Concatenates per-variable rule sets in network variable order. Binary {0,1}
// rows become bernoulli rules.
RuleProgram network_to_program(const Network& net, CompileMode mode,
                               double tol = 1e-9);

// Inverse direction for discrete programs: parents = body variables (first
// mention order), rows = the unique firing rule's distribution per joint
// parent assignment. Throws if some assignment has zero or multiple firing
// rules, or the program has continuous variables.
Network program_to_network(const RuleProgram& prog);

int count_rules(const Network& net, CompileMode mode, double tol = 1e-9);

}  // namespace cslw
