#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "flowdeg/problems.hpp"
#include "oracles.hpp"

using flowdeg::HypothesisReport;
using flowdeg::Matrix;
using flowdeg::SemilinearProblem;
using flowdeg::TransmissionLineParams;
using flowdeg::Vector;

namespace {

const flowdeg::HypothesisEntry* find_entry(const HypothesisReport& report,
                                           const std::string& name) {
  const auto it = std::find_if(
      report.entries.begin(), report.entries.end(),
      [&name](const auto& entry) { return entry.name == name; });
  return it == report.entries.end() ? nullptr : &*it;
}

/// Coercivity floor of the termination-damped line: min{beta, delta,
/// a/sigma}.
double coercivity_floor(const TransmissionLineParams& p) {
  return std::min({p.beta, p.delta, p.a / p.sigma});
}

}  // namespace

TEST_SUITE("problems") {

TEST_CASE("the default line passes every structural inequality") {
  const TransmissionLineParams params;
  const HypothesisReport report = flowdeg::check_hypotheses(params, 16);
  CHECK(report.all_pass);

  // Recompute the two quantitative inequalities from first principles.
  const auto* budget = find_entry(report, "lipschitz-budget");
  REQUIRE(budget != nullptr);
  CHECK(budget->pass);
  const double expected_budget = std::max(
      {params.lip_f * params.lip_f +
           params.alpha * params.lip_g * params.lip_g / params.gamma,
       params.gamma * params.lip_f * params.lip_f / params.alpha +
           params.lip_g * params.lip_g,
       2.0 * (params.a * params.a + params.lip_h * params.lip_h) /
           params.sigma});
  CHECK(budget->lhs == doctest::Approx(expected_budget).epsilon(1e-12));
  const double floor = coercivity_floor(params);
  CHECK(budget->rhs == doctest::Approx(floor * floor).epsilon(1e-12));

  const auto* slope = find_entry(report, "feedback-slope");
  REQUIRE(slope != nullptr);
  CHECK(slope->pass);
  CHECK(params.a > params.sigma * std::min(params.beta, params.delta));
}

TEST_CASE("discrete generators respect the continuum coercivity floor") {
  TransmissionLineParams stressed;
  stressed.alpha = 2.0;
  stressed.gamma = 0.5;
  stressed.lip_f = 0.25;
  stressed.lip_g = 0.25;
  stressed.coupling_f = 0.1;
  stressed.coupling_g = 0.1;

  oracles::Rng rng(29);
  for (const auto& params :
       {TransmissionLineParams{}, stressed}) {
    const double floor = coercivity_floor(params);
    for (int n : {4, 16}) {
      const SemilinearProblem problem =
          flowdeg::build_transmission_line(params, n);
      const auto& op = problem.op();
      CHECK(op.dim() == 2 * n + 1);
      CHECK(op.decay_rate() >= floor - 1e-12);
      const Matrix& a = op.matrix();
      const Matrix& w = op.weight();
      for (int trial = 0; trial < 100; ++trial) {
        const Vector u = rng.vector(2 * n + 1);
        const double quad = u.dot(w * (a * u));
        const double norm2 = u.dot(w * u);
        CHECK(quad >= floor * norm2 - 1e-10 * norm2);
      }
    }
  }
}

TEST_CASE("the default decay rate is frozen against drift") {
  const SemilinearProblem problem =
      flowdeg::build_transmission_line(TransmissionLineParams{}, 16);
  CHECK(problem.op().decay_rate() ==
        doctest::Approx(1.072449238830649).epsilon(1e-9));
  REQUIRE(problem.bound().has_value());
  // Weighted sup of the forcing: the (p, q) blocks carry amplitude
  // forcing + coupling = 0.2 each, the termination row
  // (a amp_e + b + amp_j) / sigma = 1.32 under its sigma-scaled weight.
  const double k2 = 0.2 * 0.2 + 0.2 * 0.2 + 0.1 * 1.32 * 1.32;
  CHECK(*problem.bound() == doctest::Approx(std::sqrt(k2)).epsilon(1e-6));
}

TEST_CASE("an oversized Lipschitz budget is rejected by name") {
  TransmissionLineParams params;
  params.lip_f = 10.0;

  const HypothesisReport report = flowdeg::check_hypotheses(params, 16);
  CHECK_FALSE(report.all_pass);
  const auto* budget = find_entry(report, "lipschitz-budget");
  REQUIRE(budget != nullptr);
  CHECK_FALSE(budget->pass);
  CHECK(budget->lhs > budget->rhs);

  try {
    (void)flowdeg::build_transmission_line(params, 16);
    FAIL("expected HypothesisError");
  } catch (const flowdeg::HypothesisError& e) {
    CHECK(std::string(e.what()).find("lipschitz-budget") !=
          std::string::npos);
  }
}

TEST_CASE("a drifting envelope is rejected by name") {
  TransmissionLineParams params;
  params.b = 0.5;  // termination envelope far beyond its declared budget
  const HypothesisReport report = flowdeg::check_hypotheses(params, 16);
  CHECK_FALSE(report.all_pass);
  bool named = false;
  for (const auto& entry : report.entries)
    if (!entry.pass) named = true;
  CHECK(named);
}

TEST_CASE("sampled checks catch an understated Lipschitz declaration") {
  SemilinearProblem::Constants constants;
  constants.lipschitz = 0.05;  // the field's true constant is 0.3
  constants.growth = 1.0;
  constants.autonomous = true;
  const SemilinearProblem liar(
      flowdeg::LinearOperator(Matrix::Identity(2, 2)),
      [](double, const Vector& x, double) {
        return (0.3 * x.array().tanh()).matrix().eval();
      },
      constants, "understated");
  const HypothesisReport report = flowdeg::check_hypotheses(liar);
  CHECK_FALSE(report.all_pass);
  const auto* lipschitz = find_entry(report, "lipschitz");
  REQUIRE(lipschitz != nullptr);
  CHECK_FALSE(lipschitz->pass);
  CHECK(lipschitz->lhs > 0.25);  // the sampler actually saw the true slope
}

TEST_CASE("the heat strip has the exact discrete spectrum") {
  for (int n : {1, 8, 31}) {
    const SemilinearProblem problem = flowdeg::build_heat_strip(
        1.0, n,
        [](double, const Vector& x, double) {
          return (0.0 * x).eval();
        },
        0.0, 0.0, 0.0);
    CHECK(problem.op().dim() == n);
    CHECK(problem.op().decay_rate() ==
          doctest::Approx(oracles::heat_strip_min_eigenvalue(n, 1.0))
              .epsilon(1e-12));
  }
  // n = 1, l = 1 collapses to the scalar rate 8.
  const SemilinearProblem tiny = flowdeg::build_heat_strip(
      1.0, 1,
      [](double, const Vector& x, double) { return (0.0 * x).eval(); }, 0.0,
      0.0, 0.0);
  CHECK(tiny.op().decay_rate() == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("presets instantiate with coherent dimensions") {
  for (const auto& name : flowdeg::preset_names()) {
    const auto preset = flowdeg::make_preset(name);
    CHECK(preset.problem.op().dim() == preset.region.dim());
    CHECK(preset.problem.period() > 0.0);
  }
  CHECK_THROWS_AS((void)flowdeg::make_preset("no-such-problem"),
                  flowdeg::ConfigError);
}

TEST_CASE("hypothesis checks pass on the shipped presets") {
  for (const auto& name : {"scalar-linear", "scalar-forced", "heat-1d"}) {
    const auto preset = flowdeg::make_preset(name);
    const HypothesisReport report = flowdeg::check_hypotheses(preset.problem);
    CHECK(report.all_pass);
  }
}

TEST_CASE("hypothesis reports serialize entry names") {
  const HypothesisReport report =
      flowdeg::check_hypotheses(TransmissionLineParams{}, 4);
  const std::string text = flowdeg::hypothesis_report_to_json(report);
  CHECK(text.find("\"schema\": 1") != std::string::npos);
  CHECK(text.find("\"all_pass\": true") != std::string::npos);
  CHECK(text.find("lipschitz-budget") != std::string::npos);
}

}  // TEST_SUITE
