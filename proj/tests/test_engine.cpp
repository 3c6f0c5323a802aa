#include <cmath>
#include <map>
#include <optional>

#include "doctest.h"
#include "support.hpp"

using namespace cslw;

namespace {

std::map<VarId, Value> as_map(const SampleRecord& rec) {
  std::map<VarId, Value> m;
  for (const auto& [v, val] : rec.assignment) m.emplace(v, val);
  return m;
}

bool has_var(const SampleRecord& rec, VarId v) {
  for (const auto& [u, _] : rec.assignment)
    if (u == v) return true;
  return false;
}

using testsup::near;

double indicator_mean(const std::vector<SampleRecord>& recs) {
  double s = 0;
  for (const auto& r : recs) s += r.indicator;
  return s / (double)recs.size();
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("query indicator is unbiased for the prior marginal") {
    RuleProgram prog = load_dcp(testsup::model_path("supplement.dcp"));
    auto recs = simulate_many(prog, {{"e", "1"}}, {}, 200000, 42);
    // exact prior is 0.74154; 4 sigma ~ 0.0039
    CHECK(near(indicator_mean(recs), 0.74154, 0.004));
    for (const auto& r : recs) CHECK(r.partial_weights.empty());
  }

  TEST_CASE("assignments stay partial: a=1 prunes b, c=1 prunes d") {
    RuleProgram prog = load_dcp(testsup::model_path("supplement.dcp"));
    VarId a = prog.vars.require("a"), b = prog.vars.require("b"),
          c = prog.vars.require("c"), d = prog.vars.require("d"),
          e = prog.vars.require("e");
    auto recs = simulate_many(prog, {{"e", "1"}}, {}, 20000, 7);
    int pruned = 0;
    for (const auto& r : recs) {
      auto m = as_map(r);
      REQUIRE(m.count(a));
      REQUIRE(m.count(e));
      CHECK(r.indicator == (vindex(m.at(e)) == 1 ? 1 : 0));
      if (vindex(m.at(a)) == 1) {
        CHECK_FALSE(has_var(r, b));  // c's a=1 rule ignores b
        ++pruned;
      } else {
        CHECK(has_var(r, b));
      }
      if (vindex(m.at(c)) == 1)
        CHECK_FALSE(has_var(r, d));  // e's c=1 rule ignores d
      else
        CHECK(has_var(r, d));
    }
    CHECK(pruned > 1000);  // a=1 happens ~10% of the time
  }

  TEST_CASE("observed heads are weighted by their firing rule") {
    RuleProgram prog = load_dcp(testsup::model_path("supplement.dcp"));
    VarId c = prog.vars.require("c"), d = prog.vars.require("d"),
          e = prog.vars.require("e");
    auto recs = simulate_many(prog, {{"a", "1"}}, {{"e", "1"}}, 50000, 11);
    double wsum = 0;
    for (const auto& r : recs) {
      CHECK_FALSE(has_var(r, e));  // evidence is never assigned
      REQUIRE(r.partial_weights.size() == 1);
      CHECK(r.partial_weights[0].first == e);
      auto m = as_map(r);
      double want = vindex(m.at(c)) == 1 ? 0.9
                    : vindex(m.at(d)) == 1 ? 0.4
                                           : 0.3;
      CHECK(r.partial_weights[0].second == want);
      wsum += r.partial_weights[0].second;
    }
    // E[W_e] over the prior of (c,d) is exactly P(e=1) = 0.74154
    CHECK(near(wsum / 50000, 0.74154, 0.005));
  }

  TEST_CASE("evidence read during proof is neither sampled nor weighted") {
    RuleProgram prog = load_dcp(testsup::model_path("supplement.dcp"));
    VarId a = prog.vars.require("a"), c = prog.vars.require("c");
    auto recs = simulate_many(prog, {{"c", "1"}}, {{"a", "1"}}, 50000, 13);
    for (const auto& r : recs) {
      CHECK_FALSE(has_var(r, a));
      CHECK(r.partial_weights.empty());  // a is predictive: clamped, no weight
      REQUIRE(r.assignment.size() == 1);
      CHECK(r.assignment[0].first == c);
    }
    // c := a=1 fires with bernoulli(0.2)
    CHECK(near(indicator_mean(recs), 0.2, 0.008));
  }

  TEST_CASE("continuous thresholds pick the firing rule") {
    RuleProgram prog = load_dcp(testsup::model_path("machine.dcp"));
    VarId t = prog.vars.require("t"), broken = prog.vars.require("broken");
    SimOptions opt;
    opt.record_trace = true;
    auto recs = simulate_many(prog, {{"broken", "1"}}, {}, 200000, 17, opt);
    int above = 0;
    for (const auto& r : recs) {
      auto m = as_map(r);
      REQUIRE(m.count(t));
      REQUIRE(is_real(m.at(t)));
      double tv = vreal(m.at(t));
      if (tv > 30) ++above;
      for (const auto& step : r.trace) {
        if (step.var != broken) continue;
        const Rule& rule = prog.rules[step.rule_id];
        for (const Atom& atom : rule.body)
          if (atom.var == t) CHECK(atom.holds(m.at(t)));
      }
    }
    CHECK(near(indicator_mean(recs), 0.55403, 0.005));
    // P(t > 30) with t ~ N(25, 2.2): 0.011513
    CHECK(near(above / 200000.0, 0.011513, 0.0012));
  }

  TEST_CASE("trace replays: every step's rule fired under values that hold") {
    Rng rng(2025);
    SimOptions opt;
    opt.record_trace = true;
    for (int trial = 0; trial < 25; ++trial) {
      RuleProgram prog = testsup::random_program(rng, 5 + (int)(rng() % 4),
                                                 trial % 3 == 0);
      AssignmentMap query, evidence;
      testsup::random_query_evidence(rng, prog.vars, query, evidence);
      if (query.empty()) continue;
      BoundAssignment ev = bind_assignment(prog.vars, evidence);
      auto recs = simulate_many(prog, query, evidence, 40, derive_seed(99, trial), opt);
      for (const auto& r : recs) {
        auto m = as_map(r);
        auto value_of = [&](VarId v) -> std::optional<Value> {
          if (m.count(v)) return m.at(v);
          if (ev.has(v)) return ev.value[v];
          return std::nullopt;
        };
        for (const auto& step : r.trace) {
          const Rule& rule = prog.rules[step.rule_id];
          REQUIRE(rule.head == step.var);
          // the recorded partial parent assignment satisfies the body and
          // agrees with the final state
          REQUIRE(step.ppa.size() == rule.body.size());
          for (size_t i = 0; i < rule.body.size(); ++i) {
            const Atom& atom = rule.body[i];
            CHECK(step.ppa[i].first == atom.var);
            CHECK(atom.holds(step.ppa[i].second));
            auto now = value_of(atom.var);
            REQUIRE(now.has_value());
            CHECK(*now == step.ppa[i].second);
          }
          if (step.weighted) {
            REQUIRE(ev.has(step.var));
            bool found = false;
            for (const auto& [v, w] : r.partial_weights)
              if (v == step.var) {
                found = true;
                CHECK(w == weight_at(rule.dist, ev.value[step.var].value()));
              }
            CHECK(found);
          } else {
            CHECK(has_var(r, step.var));
          }
        }
      }
    }
  }

  TEST_CASE("sampling distribution of partial records matches the rule chain") {
    RuleProgram prog = load_dcp(testsup::model_path("supplement.dcp"));
    SimOptions opt;
    opt.record_trace = true;
    int n = 100000;
    auto recs = simulate_many(prog, {{"c", "1"}}, {{"e", "1"}}, n, 23, opt);
    std::map<std::string, std::pair<int, double>> groups;  // key -> (count, q)
    for (const auto& r : recs) {
      auto m = as_map(r);
      std::string key;
      for (const auto& [v, val] : m)
        key += prog.vars[v].name + "=" + format_value(prog.vars[v], val) + ",";
      double q = 1.0;
      for (const auto& step : r.trace)
        if (!step.weighted)
          q *= mass_at(prog.rules[step.rule_id].dist, vindex(m.at(step.var)));
      auto [it, fresh] = groups.emplace(key, std::make_pair(0, q));
      it->second.first += 1;
      if (!fresh) CHECK(it->second.second == q);
    }
    // every distinct partial assignment occurs with the product probability
    double total = 0;
    for (const auto& [key, cq] : groups) {
      auto [count, q] = cq;
      double se = std::sqrt(q * (1 - q) / n);
      CHECK_MESSAGE(near((double)count / n, q, 5 * se + 1e-4), key);
      total += q;
    }
    CHECK(total == doctest::Approx(1.0));  // partial records partition the space
  }

  TEST_CASE("same seed, same records") {
    RuleProgram prog = load_dcp(testsup::model_path("machine.dcp"));
    auto a = simulate_many(prog, {{"broken", "1"}}, {{"cool", "1"}}, 64, 4242);
    auto b = simulate_many(prog, {{"broken", "1"}}, {{"cool", "1"}}, 64, 4242);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].indicator == b[i].indicator);
      CHECK(a[i].assignment == b[i].assignment);
      CHECK(a[i].partial_weights == b[i].partial_weights);
    }
    // and a direct Simulator run with the same derived seed matches
    BoundAssignment ev = bind_assignment(prog.vars, {{"cool", "1"}});
    Simulator sim(prog, ev, query_atoms(prog, {{"broken", "1"}}));
    SampleRecord r0 = sim.run(derive_seed(4242, 0));
    CHECK(r0.assignment == a[0].assignment);
    CHECK(r0.indicator == a[0].indicator);
  }

  TEST_CASE("a gap in rule coverage surfaces as a runtime error") {
    RuleProgram p;
    Variable x, y;
    x.name = "x";
    x.domain = {"0", "1"};
    y.name = "y";
    y.domain = {"0", "1"};
    VarId xi = p.vars.add(std::move(x));
    VarId yi = p.vars.add(std::move(y));
    p.rules.push_back({yi, Bernoulli{0.5}, {}});
    p.rules.push_back({xi, Bernoulli{0.5}, {{yi, Cmp::Eq, Value{1}}}});
    p.finalize();  // x has no rule for y=0 (validate_program would flag it)
    BoundAssignment ev = bind_assignment(p.vars, {{"y", "0"}});
    Simulator sim(p, ev, query_atoms(p, {{"x", "1"}}));
    CHECK_THROWS_WITH_AS(sim.run(1), doctest::Contains("no rule of 'x'"), Error);
  }

  TEST_CASE("full-network weighting weighs every evidence variable") {
    Network net = load_bif(testsup::model_path("supplement.bif"));
    auto plain = simulate_full_lw(net, {{"e", "1"}}, {}, 100000, 31);
    double s = 0;
    for (const auto& smp : plain) {
      CHECK(smp.weight == 1.0);
      s += smp.indicator;
    }
    CHECK(near(s / 100000, 0.74154, 0.006));

    // root evidence: the weight is the root's prior mass, constant
    auto rooted = simulate_full_lw(net, {{"e", "1"}}, {{"a", "1"}}, 50000, 37);
    double num = 0, den = 0;
    for (const auto& smp : rooted) {
      CHECK(smp.weight == doctest::Approx(0.1).epsilon(1e-12));
      num += smp.weight * smp.indicator;
      den += smp.weight;
    }
    CHECK(near(num / den, 0.444, 0.01));
  }

  TEST_CASE("context view splits a record against the partition") {
    RuleProgram prog = load_dcp(testsup::model_path("figure1.dcp"));
    AssignmentMap query{{"e", "1"}};
    AssignmentMap evidence{{"d", "1"}, {"f", "1"}, {"g", "0"}, {"h", "1"}};
    RequisitePartition part = classify_requisite(prog, query, evidence);
    auto recs = simulate_many(prog, query, evidence, 2000, 41);
    VarId a = prog.vars.require("a");
    for (const auto& r : recs) {
      ContextView ctx = context_view(r, part);
      // assigned + residual unobserved = {a,b,c,e}; weighted + residual
      // evidence = {f,g,h} (d is predictive, in neither list)
      CHECK(ctx.assigned_unobserved.size() + ctx.residual_unobserved.size() == 4);
      CHECK(ctx.weighted_evidence.size() + ctx.residual_evidence.size() == 3);
      auto m = as_map(r);
      if (m.count(a) && vindex(m.at(a)) == 1) {
        CHECK(ctx.assigned_unobserved.size() == 2);  // a and e only
        CHECK(ctx.weighted_evidence.empty());        // f,g,h all residual
      }
      CHECK(is_safe(prog.vars, dag_of(prog), part, ctx));
    }
  }
}
