#include "cslw/engine.hpp"

#include <algorithm>

namespace cslw {

int RngChooser::choose_index(const Distribution&, std::span<const double> pmf) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  double acc = 0.0;
  for (size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(pmf.size()) - 1;
}

double RngChooser::choose_real(const Gaussian& g) {
  return std::normal_distribution<double>(g.mean, g.stddev)(rng_);
}

Simulator::Simulator(const RuleProgram& prog, const BoundAssignment& evidence,
                     std::vector<Atom> query, SimOptions opt)
    : prog_(&prog), evidence_(&evidence), query_(std::move(query)), opt_(opt) {
  int n = prog.vars.size();
  asg_epoch_.assign(n, -1);
  top_epoch_.assign(n, -1);
  bottom_epoch_.assign(n, -1);
  weight_epoch_.assign(n, -1);
  dst_epoch_.assign(n, -1);
  asg_.assign(n, Value{0});
  dst_rule_.assign(n, -1);
  weight_.assign(n, 0.0);
  for (const Atom& a : query_)
    if (evidence.has(a.var))
      throw ModelError("query variable '" + prog.vars[a.var].name +
                       "' is observed");
}

void Simulator::reset() {
  ++epoch_;
  forward_.clear();
  asg_order_.clear();
  weigh_order_.clear();
  trace_.clear();
}

Value Simulator::sample_head(VarId v, int rule_id, Chooser& chooser) {
  const Distribution& d = prog_->rules[rule_id].dist;
  if (auto* g = std::get_if<Gaussian>(&d)) return Value{chooser.choose_real(*g)};
  if (auto* b = std::get_if<Bernoulli>(&d)) {
    pmf_scratch_ = {1.0 - b->p, b->p};
    return Value{chooser.choose_index(d, pmf_scratch_)};
  }
  const auto& probs = std::get<DiscreteDist>(d).probs;
  return Value{chooser.choose_index(d, probs)};
}

// Resolve one variable to a value: read the evidence if observed, the current
// assignment if already sampled, otherwise fire its rules and sample. The
// sampled variable joins the forward queue so its children get visited.
Value Simulator::resolve(VarId v, Chooser& chooser) {
  if (evidence_->has(v)) return *evidence_->value[v];
  if (on_top(v)) {
    if (!assigned(v))
      throw Error("cyclic dependency while resolving '" + prog_->vars[v].name + "'");
    return asg_[v];
  }
  top_epoch_[v] = epoch_;
  for (int r : prog_->head_rules[v]) {
    if (prove(prog_->rules[r].body, chooser)) dst_rule_[v] = r, dst_epoch_[v] = epoch_;
  }
  if (dst_epoch_[v] != epoch_)
    throw Error("no rule of '" + prog_->vars[v].name +
                "' fires: program not exhaustive");
  int rule_id = dst_rule_[v];
  Value y = sample_head(v, rule_id, chooser);
  asg_[v] = y;
  asg_epoch_[v] = epoch_;
  asg_order_.push_back(v);
  if (opt_.record_trace) {
    TraceStep step{v, rule_id, false, {}};
    for (const Atom& a : prog_->rules[rule_id].body)
      step.ppa.emplace_back(a.var, resolve(a.var, chooser));
    trace_.push_back(std::move(step));
  }
  if (!on_bottom(v)) {
    bottom_epoch_[v] = epoch_;
    forward_.push_back(v);
  }
  return y;
}

bool Simulator::prove(std::span<const Atom> goal, Chooser& chooser) {
  for (const Atom& a : goal) {
    Value y = resolve(a.var, chooser);
    if (!a.holds(y)) return false;  // state mutations so far persist
  }
  return true;
}

double Simulator::weigh_observed(VarId h, Chooser& chooser) {
  if (!on_top(h)) top_epoch_[h] = epoch_;
  for (int r : prog_->head_rules[h]) {
    if (prove(prog_->rules[r].body, chooser)) dst_rule_[h] = r, dst_epoch_[h] = epoch_;
  }
  if (dst_epoch_[h] != epoch_)
    throw Error("no rule of '" + prog_->vars[h].name +
                "' fires: program not exhaustive");
  double w = weight_at(prog_->rules[dst_rule_[h]].dist, *evidence_->value[h]);
  weight_[h] = w;
  weight_epoch_[h] = epoch_;
  weigh_order_.push_back(h);
  if (opt_.record_trace) {
    TraceStep step{h, dst_rule_[h], true, {}};
    for (const Atom& a : prog_->rules[dst_rule_[h]].body)
      step.ppa.emplace_back(a.var, resolve(a.var, chooser));
    trace_.push_back(std::move(step));
  }
  return w;
}

void Simulator::forward_phase(Chooser& chooser) {
  while (!forward_.empty()) {
    VarId m = forward_.front();
    forward_.pop_front();
    for (int r : prog_->body_rules[m]) {
      VarId h = prog_->rules[r].head;
      if (evidence_->has(h)) {
        if (!on_top(h)) weigh_observed(h, chooser);
      } else if (!on_bottom(h)) {
        bottom_epoch_[h] = epoch_;
        forward_.push_back(h);
      }
    }
  }
}

void Simulator::record(SampleRecord& out) const {
  out.assignment.reserve(asg_order_.size());
  for (VarId v : asg_order_) out.assignment.emplace_back(v, asg_[v]);
  out.partial_weights.reserve(weigh_order_.size());
  for (VarId v : weigh_order_) out.partial_weights.emplace_back(v, weight_[v]);
  if (opt_.record_trace) out.trace = trace_;
}

SampleRecord Simulator::run(Chooser& chooser) {
  reset();
  SampleRecord rec;
  rec.indicator = prove(query_, chooser) ? 1 : 0;
  forward_phase(chooser);
  record(rec);
  return rec;
}

SampleRecord Simulator::run(std::uint64_t seed) {
  RngChooser chooser(seed);
  return run(chooser);
}

std::vector<Atom> query_atoms(const RuleProgram& prog, const AssignmentMap& query) {
  BoundAssignment bound = bind_assignment(prog.vars, query);
  std::vector<Atom> out;
  for (auto& [v, val] : bound.items) out.push_back(Atom{v, Cmp::Eq, val});
  return out;
}

std::vector<SampleRecord> simulate_many(const RuleProgram& prog,
                                        const AssignmentMap& query,
                                        const AssignmentMap& evidence, int n,
                                        std::uint64_t seed, SimOptions opt) {
  BoundAssignment ev = bind_assignment(prog.vars, evidence);
  Simulator sim(prog, ev, query_atoms(prog, query), opt);
  std::vector<SampleRecord> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    RngChooser chooser(derive_seed(seed, i));
    out.push_back(sim.run(chooser));
  }
  return out;
}

std::vector<FullLwSample> simulate_full_lw(const Network& net,
                                           const AssignmentMap& query,
                                           const AssignmentMap& evidence, int n,
                                           std::uint64_t seed) {
  BoundAssignment q = bind_assignment(net.vars, query);
  BoundAssignment ev = bind_assignment(net.vars, evidence);
  for (auto& [v, _] : q.items)
    if (ev.has(v))
      throw ModelError("query variable '" + net.vars[v].name + "' is observed");
  std::vector<VarId> order = topological_order(net.vars, dag_of(net));

  std::vector<FullLwSample> out;
  out.reserve(n);
  std::vector<int> full(net.vars.size(), 0);
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, i));
    double w = 1.0;
    for (VarId v : order) {
      const Distribution& d = net.dist_at(v, full);
      if (ev.has(v)) {
        int idx = vindex(*ev.value[v]);
        w *= mass_at(d, idx);
        full[v] = idx;
      } else {
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        int dom = static_cast<int>(net.vars[v].domain.size());
        double acc = 0.0;
        int idx = dom - 1;
        for (int k = 0; k < dom; ++k) {
          acc += mass_at(d, k);
          if (u < acc) {
            idx = k;
            break;
          }
        }
        full[v] = idx;
      }
    }
    int ind = 1;
    for (auto& [v, val] : q.items)
      if (full[v] != vindex(val)) {
        ind = 0;
        break;
      }
    out.push_back({ind, w});
  }
  return out;
}

ContextView context_view(const SampleRecord& rec, const RequisitePartition& part) {
  ContextView ctx;
  std::vector<bool> asg(part.n_vars, false), wgt(part.n_vars, false);
  for (auto& [v, _] : rec.assignment) {
    asg[v] = true;
    ctx.assigned_unobserved.push_back(v);
  }
  for (auto& [v, _] : rec.partial_weights) {
    wgt[v] = true;
    ctx.weighted_evidence.push_back(v);
  }
  for (VarId v : part.requisite_unobserved)
    if (!asg[v]) ctx.residual_unobserved.push_back(v);
  for (VarId v : part.diagnostic_evidence)
    if (!wgt[v]) ctx.residual_evidence.push_back(v);
  return ctx;
}

}  // namespace cslw
