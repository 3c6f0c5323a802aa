#pragma once

#include <deque>
#include <span>

#include "cslw/bayesball.hpp"
#include "cslw/model.hpp"

namespace cslw {

// Where each sampled/weighted value came from: the rule that fired and the
// body values it was resolved under (the partial parent assignment).
struct TraceStep {
  VarId var = -1;
  int rule_id = -1;
  bool weighted = false;  // true: evidence weight, false: sampled assignment
  std::vector<std::pair<VarId, Value>> ppa;
};

struct SampleRecord {
  int indicator = 0;  // 1 iff the query conjunction was proved
  std::vector<std::pair<VarId, Value>> assignment;      // sampled, in order
  std::vector<std::pair<VarId, double>> partial_weights;  // weighted evidence
  std::vector<TraceStep> trace;  // only when SimOptions::record_trace
};

struct SimOptions {
  bool record_trace = false;
};

// Value source for one simulation: the sampler draws from the distribution;
// the exhaustive oracle substitutes scripted choices. Continuous draws are
// not scriptable.
class Chooser {
 public:
  virtual ~Chooser() = default;
  virtual int choose_index(const Distribution& d, std::span<const double> pmf) = 0;
  virtual double choose_real(const Gaussian& g) = 0;
};

class RngChooser : public Chooser {
 public:
  explicit RngChooser(std::uint64_t seed) : rng_(seed) {}
  explicit RngChooser(Rng rng) : rng_(std::move(rng)) {}
  int choose_index(const Distribution& d, std::span<const double> pmf) override;
  double choose_real(const Gaussian& g) override;

 private:
  Rng rng_;
};

// One likelihood-weighted simulation of a rule program. Proves the query
// conjunction (sampling unobserved variables on demand, reading evidence for
// observed ones), then propagates forward from every assigned variable:
// unobserved children get scheduled, observed children get weighted by their
// firing rule's distribution at the observed value. Variables irrelevant to
// the query and evidence are never touched, and evidence whose parents were
// never assigned is never weighted (it stays residual).
class Simulator {
 public:
  Simulator(const RuleProgram& prog, const BoundAssignment& evidence,
            std::vector<Atom> query, SimOptions opt = {});

  SampleRecord run(Chooser& chooser);
  SampleRecord run(std::uint64_t seed);

  // Observed-head weighting on the current state; used by the weight-matrix
  // fill-in, which calls this for each missing column within one state.
  double weigh_observed(VarId evidence_var, Chooser& chooser);
  void reset();

  const RuleProgram& program() const { return *prog_; }

 private:
  bool prove(std::span<const Atom> goal, Chooser& chooser);
  Value resolve(VarId v, Chooser& chooser);
  void forward_phase(Chooser& chooser);
  void record(SampleRecord& out) const;

  const RuleProgram* prog_;
  const BoundAssignment* evidence_;
  std::vector<Atom> query_;
  SimOptions opt_;

  // epoch-stamped per-variable state, cleared by bumping epoch_
  std::vector<int> asg_epoch_, top_epoch_, bottom_epoch_, weight_epoch_,
      dst_epoch_;
  std::vector<Value> asg_;
  std::vector<int> dst_rule_;
  std::vector<double> weight_;
  int epoch_ = 0;

  std::deque<VarId> forward_;
  std::vector<VarId> asg_order_, weigh_order_;
  std::vector<TraceStep> trace_;
  std::vector<double> pmf_scratch_;

  bool assigned(VarId v) const { return asg_epoch_[v] == epoch_; }
  bool on_top(VarId v) const { return top_epoch_[v] == epoch_; }
  bool on_bottom(VarId v) const { return bottom_epoch_[v] == epoch_; }
  bool weighted(VarId v) const { return weight_epoch_[v] == epoch_; }
  Value sample_head(VarId v, int rule_id, Chooser& chooser);
  int firing_rule(VarId v) const { return dst_rule_[v]; }
};

std::vector<Atom> query_atoms(const RuleProgram& prog, const AssignmentMap& query);

// Convenience: n independent simulations with per-sample seeds derived from
// `seed` (stable under any parallel split).
std::vector<SampleRecord> simulate_many(const RuleProgram& prog,
                                        const AssignmentMap& query,
                                        const AssignmentMap& evidence, int n,
                                        std::uint64_t seed, SimOptions opt = {});

// Plain likelihood weighting over the full network: samples every unobserved
// variable in topological order, weighs every evidence variable.
struct FullLwSample {
  int indicator = 0;
  double weight = 1.0;
};
std::vector<FullLwSample> simulate_full_lw(const Network& net,
                                           const AssignmentMap& query,
                                           const AssignmentMap& evidence, int n,
                                           std::uint64_t seed);

// What one simulation assigned/weighted versus a partition: the inputs the
// safety check needs.
ContextView context_view(const SampleRecord& rec, const RequisitePartition& part);

}  // namespace cslw
