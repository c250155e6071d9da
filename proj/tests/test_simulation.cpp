#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include <setobs/monte_carlo.hpp>
#include <setobs/plant.hpp>
#include <setobs/scenario.hpp>
#include <setobs/trace_io.hpp>

using namespace setobs;

namespace {

LtiSystem scalar(double a) {
  LtiSystem s;
  s.A = Matrix::Constant(1, 1, a);
  s.B = Matrix::Ones(1, 1);
  s.C = Matrix::Ones(1, 1);
  s.D = Matrix::Zero(1, 1);
  return s;
}

ScenarioConfig short_run(const char* name, double horizon) {
  ScenarioConfig c = builtin_scenario(name);
  c.horizon = horizon;
  return c;
}

}  // namespace

TEST(Plant, ConstantInputIsExact) {
  SignalVector w;
  w.comps = {Signal::constant(2.0)};
  const Trajectory tr = simulate_plant(scalar(0.0), Vector::Ones(1), w, 0.5, 3, 5.0);
  ASSERT_EQ(tr.x.size(), 11u);
  for (std::size_t k = 0; k < tr.x.size(); ++k) EXPECT_NEAR(tr.x[k](0), 1.0 + 2.0 * tr.t[k], 1e-13);
}

TEST(Plant, DecayMatchesExponential) {
  SignalVector w;
  w.comps = {Signal::constant(0.0)};
  const Trajectory tr = simulate_plant(scalar(-1.0), Vector::Ones(1), w, 1.0, 100, 1.0);
  EXPECT_NEAR(tr.x.back()(0), std::exp(-1.0), 1e-8);
}

TEST(Scenario, JsonRoundTrip) {
  for (const char* name : {"example1", "example2", "synthetic", "synthetic_unstable"}) {
    const ScenarioConfig c = builtin_scenario(name);
    const auto j = scenario_to_json(c);
    const ScenarioConfig back = scenario_from_json(j);
    EXPECT_EQ(scenario_to_json(back).dump(), j.dump()) << name;
    EXPECT_TRUE(back.sys.A == c.sys.A) << name;
  }
}

TEST(Scenario, Example2Spectrum) {
  const ScenarioConfig c = builtin_scenario("example2");
  Eigen::EigenSolver<Matrix> es(c.sys.A);
  std::vector<double> re;
  for (Index i = 0; i < 3; ++i) {
    EXPECT_EQ(es.eigenvalues()(i).imag(), 0.0);
    re.push_back(es.eigenvalues()(i).real());
  }
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -20.0, 1e-12);
  EXPECT_NEAR(re[1], -17.0, 1e-12);
  EXPECT_NEAR(re[2], 2.0, 1e-12);
}

TEST(Scenario, RejectsMalformedInput) {
  auto j = scenario_to_json(builtin_scenario("example2"));
  j["dt"] = -1.0;
  EXPECT_THROW(scenario_from_json(j), Error);
  auto k = scenario_to_json(builtin_scenario("example2"));
  k.erase("system");
  EXPECT_THROW(scenario_from_json(k), Error);
  EXPECT_THROW(builtin_scenario("nope"), Error);
}

TEST(Trace, EmptyRunIsHeaderOnly) {
  const std::string s = trace_csv({}, 3);
  EXPECT_EQ(s, trace_header(3) + "\n");
  EXPECT_TRUE(parse_traces(s).rows.empty());
}

TEST(Trace, ParseInvertsEmit) {
  const ObserverDesign d = prepare_design(short_run("synthetic", 1.0));
  const RunResult run = run_pipeline(d);
  const ParsedTrace p = parse_traces(trace_csv(run.rows, 2));
  EXPECT_EQ(p.n, 2);
  ASSERT_EQ(p.rows.size(), run.rows.size());
  for (std::size_t i = 0; i < p.rows.size(); ++i) EXPECT_TRUE(p.rows[i] == run.rows[i]) << i;
}

TEST(Pipeline, StepOrdering) {
  ScenarioConfig c = builtin_scenario("synthetic");
  c.horizon = c.dt;
  const ObserverDesign d = prepare_design(c);
  RunOptions opt;
  opt.step_log = true;
  const RunResult run = run_pipeline(d, opt);
  const std::vector<std::string> want = {"continuous", "gamma", "alpha", "propagate", "gate", "beta", "update", "fuse"};
  EXPECT_EQ(run.log, want);
  EXPECT_EQ(run.updates, 1);
}

TEST(Pipeline, Example1Contained) {
  const ObserverDesign d = prepare_design(builtin_scenario("example1"));
  RunOptions opt;
  opt.check_eps1 = true;
  const RunResult run = run_pipeline(d, opt);
  EXPECT_TRUE(run.contained_all);
  EXPECT_LE(run.eps1_worst_ratio, 1.0);
  EXPECT_EQ(run.rows.size(), static_cast<std::size_t>(d.steps) + 1);
}

TEST(Pipeline, Example2ContainedWithoutUpdates) {
  const ObserverDesign d = prepare_design(builtin_scenario("example2"));
  const RunResult run = run_pipeline(d);
  EXPECT_TRUE(run.contained_all);
  EXPECT_EQ(run.updates, 0);
  for (std::size_t k = 1; k < run.steps.size(); ++k) EXPECT_TRUE(run.steps[k].skipped);
}

TEST(Pipeline, TinyUncertaintyShrinks) {
  ScenarioConfig c = builtin_scenario("synthetic");
  c.Kw = SignalMatrix::constant(Matrix::Constant(1, 1, 1e-10));
  c.w_true = c.cw;
  const ObserverDesign d = prepare_design(c);
  const RunResult run = run_pipeline(d);
  EXPECT_TRUE(run.contained_all);
  EXPECT_LT(run.rows.back().trP, 1e-2 * run.rows.front().trP);
}

TEST(MonteCarlo, ZeroRuns) {
  const ObserverDesign d = prepare_design(short_run("example2", 1.0));
  const McSummary s = monte_carlo_containment(d, 0, 1);
  EXPECT_EQ(s.runs, 0);
  EXPECT_TRUE(s.details.empty());
}

TEST(MonteCarlo, DeterministicAcrossThreads) {
  const ObserverDesign d = prepare_design(short_run("example2", 2.0));
  const McSummary a = monte_carlo_containment(d, 6, 11, 1);
  const McSummary b = monte_carlo_containment(d, 6, 11, 1);
  const McSummary c = monte_carlo_containment(d, 6, 11, 3);
  ASSERT_EQ(a.details.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(a.details[i].seed, b.details[i].seed);
    EXPECT_EQ(a.details[i].worst_quadratic_form, b.details[i].worst_quadratic_form);
    EXPECT_EQ(a.details[i].worst_quadratic_form, c.details[i].worst_quadratic_form);
    EXPECT_TRUE(a.details[i].x0 == c.details[i].x0);
  }
  EXPECT_NE(a.details[0].seed, a.details[1].seed);
}

TEST(MonteCarlo, BoundaryRunsContained) {
  const ObserverDesign d = prepare_design(short_run("example2", 2.0));
  const McSummary s = monte_carlo_containment(d, 8, 5);
  EXPECT_EQ(s.boundary_runs, static_cast<int>(std::lround(d.cfg.mc.boundary_fraction * 8)));
  const Ellipsoid X0 = d.cfg.initial_set();
  for (const McRun& r : s.details) {
    if (r.boundary) {
      EXPECT_NEAR(X0.quadratic_form(r.x0), 1.0, 1e-9);
    }
    EXPECT_TRUE(r.contained);
  }
  EXPECT_EQ(s.containment_rate, 1.0);
}

TEST(MonteCarlo, SampledInputsAreAdmissible) {
  const ScenarioConfig c = builtin_scenario("example1");
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    const SignalVector w = sample_admissible_input(c, rng);
    for (double t = 0.0; t < 30.0; t += 0.37) {
      const Ellipsoid Wt(c.cw(t), c.Kw(t));
      EXPECT_LE(Wt.quadratic_form(w(t)), 1.0 + 1e-12);
    }
  }
}
