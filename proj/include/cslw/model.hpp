#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cslw/common.hpp"

namespace cslw {

using VarId = int;

enum class VarKind { Discrete, Continuous };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Discrete;
  std::vector<std::string> domain;  // value labels; empty for continuous

  int value_index(std::string_view label) const;  // -1 if absent
};

// Discrete values are indices into the variable's domain; continuous values
// are reals. The two never mix for one variable.
using Value = std::variant<int, double>;

inline bool is_real(const Value& v) { return std::holds_alternative<double>(v); }
inline int vindex(const Value& v) { return std::get<int>(v); }
inline double vreal(const Value& v) { return std::get<double>(v); }

class VariableTable {
 public:
  VarId add(Variable v);  // throws ModelError on duplicate name
  std::optional<VarId> find(std::string_view name) const;
  VarId require(std::string_view name) const;  // throws if absent

  const Variable& operator[](VarId id) const { return vars_[id]; }
  Variable& operator[](VarId id) { return vars_[id]; }
  int size() const { return static_cast<int>(vars_.size()); }

  auto begin() const { return vars_.begin(); }
  auto end() const { return vars_.end(); }

 private:
  std::vector<Variable> vars_;
  std::map<std::string, VarId, std::less<>> index_;
};

struct Bernoulli {
  double p = 0.0;  // probability of label "1"
};
struct DiscreteDist {
  std::vector<double> probs;  // aligned with the head variable's domain
};
struct Gaussian {
  double mean = 0.0;
  double stddev = 1.0;
};
using Distribution = std::variant<Bernoulli, DiscreteDist, Gaussian>;

bool is_continuous(const Distribution& d);
double mass_at(const Distribution& d, int index);        // discrete kinds only
double density_at(const Distribution& d, double x);      // gaussian only
double weight_at(const Distribution& d, const Value& v); // mass or density
int domain_size(const Distribution& d);                  // -1 for gaussian
// Throws ModelError unless probabilities are in [0,1] (sum within 1e-9 of 1
// for discrete), stddev > 0, and discrete size matches the variable's domain.
void check_distribution(const Distribution& d, const Variable& head);
bool same_distribution(const Distribution& a, const Distribution& b);

enum class Cmp { Eq, Lt, Le, Gt, Ge };

std::string_view cmp_token(Cmp c);

struct Atom {
  VarId var = -1;
  Cmp cmp = Cmp::Eq;
  Value value = 0;

  bool holds(const Value& resolved) const;  // resolved value of `var`
};

struct Rule {
  VarId head = -1;
  Distribution dist;
  std::vector<Atom> body;  // conjunction, evaluated left to right
};

// Rule program over the variable table. `finalize()` builds the derived
// indices and must be called after the rule list changes.
struct RuleProgram {
  VariableTable vars;
  std::vector<Rule> rules;  // definition order; engine iterates in this order

  std::vector<std::vector<int>> head_rules;   // var -> rule ids with that head
  std::vector<std::vector<int>> body_rules;   // var -> rule ids mentioning it
  std::vector<std::vector<VarId>> parents;    // induced graph, first-mention order
  std::vector<std::vector<VarId>> children;

  void finalize();
  bool has_continuous() const;
};

struct TabularCpd {
  // One row per joint parent assignment; the rightmost parent varies fastest.
  std::vector<Distribution> rows;
};

struct TreeCpdNode {
  VarId split = -1;  // -1: leaf
  Distribution leaf;
  std::vector<TreeCpdNode> children;  // one per split-variable domain value

  bool is_leaf() const { return split < 0; }
};
struct TreeCpd {
  TreeCpdNode root;
};

using Cpd = std::variant<TabularCpd, TreeCpd>;

struct Network {
  VariableTable vars;
  std::vector<std::vector<VarId>> parents;
  std::vector<Cpd> cpds;

  std::vector<std::vector<VarId>> children() const;
  int row_count(VarId v) const;  // product of parent domain sizes
  // Row index of a full joint assignment (rightmost parent fastest).
  int row_index(VarId v, const std::vector<int>& full) const;
  const Distribution& dist_at(VarId v, const std::vector<int>& full) const;
};

// Query/evidence at the API boundary: variable name -> value label.
using AssignmentMap = std::map<std::string, std::string>;

// "a=1,b=0" -> {a:"1", b:"0"}; empty/whitespace input -> empty map.
// Duplicate variables are an error; names are not resolved here.
AssignmentMap parse_assignment_list(std::string_view text);

struct BoundAssignment {
  std::vector<std::optional<Value>> value;        // dense, by VarId
  std::vector<std::pair<VarId, Value>> items;     // name order

  bool has(VarId v) const { return value[v].has_value(); }
};

// Resolves labels against domains (continuous values parse as reals).
BoundAssignment bind_assignment(const VariableTable& vars, const AssignmentMap& m);

struct Dag {
  std::vector<std::vector<VarId>> parents;
  std::vector<std::vector<VarId>> children;
};

Dag dag_of(const Network& net);
Dag dag_of(const RuleProgram& prog);

// Kahn's algorithm; ties broken by variable name. Throws ModelError naming a
// cycle member if the graph is cyclic.
std::vector<VarId> topological_order(const VariableTable& vars, const Dag& dag);

struct ValidationIssue {
  enum class Kind {
    NoRules,          // variable never appears as a head
    Overlap,          // two rules can fire together (witness assignment)
    Uncovered,        // no rule fires (witness assignment)
    Cycle,            // induced graph has a cycle
    BadDistribution,  // parameter out of range
    NotChecked,       // exclusivity search exceeded the combination cap
  };
  Kind kind;
  std::string variable;
  std::string detail;
  int rule_a = -1;
  int rule_b = -1;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  // NotChecked entries are notes, not errors: a head whose witness space
  // exceeds the cap is reported but does not fail validation.
  bool ok() const {
    for (const auto& i : issues)
      if (i.kind != ValidationIssue::Kind::NotChecked) return false;
    return true;
  }
  std::string to_string() const;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& msg, ValidationReport r)
      : Error(msg), report(std::move(r)) {}
  ValidationReport report;
};

// Checks acyclicity, per-head mutual exclusivity and exhaustiveness (joint
// assignments of the union of body variables; continuous variables enumerate
// the interval partition induced by their comparison thresholds), and
// distribution parameters. Heads whose joint witness space exceeds
// `combo_cap` get a NotChecked issue instead of an exclusivity result.
ValidationReport validate_program(const RuleProgram& prog,
                                  std::size_t combo_cap = std::size_t{1} << 20);

std::string format_value(const Variable& var, const Value& v);

}  // namespace cslw
