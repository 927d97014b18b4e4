#include "flowdeg/averaging.hpp"

#include <array>
#include <cmath>

namespace flowdeg {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kNodes = {
    -0.9602898564975362, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975362};
constexpr std::array<double, 8> kWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

struct Rule {
  std::vector<double> times;
  std::vector<double> weights;  // divided by T: weights sum to 1
};

Rule composite_rule(double period, int nodes) {
  int panels = std::max(1, (nodes + 7) / 8);
  Rule rule;
  rule.times.reserve(8 * panels);
  rule.weights.reserve(8 * panels);
  double width = period / panels;
  for (int p = 0; p < panels; ++p) {
    double mid = (p + 0.5) * width;
    for (int k = 0; k < 8; ++k) {
      rule.times.push_back(mid + 0.5 * width * kNodes[k]);
      rule.weights.push_back(0.5 * width * kWeights[k] / period);
    }
  }
  return rule;
}

Vector quadrature(const Nonlinearity& f, const Rule& rule, const Vector& x,
                  double mu) {
  Vector sum = rule.weights[0] * f(rule.times[0], x, mu);
  for (std::size_t k = 1; k < rule.times.size(); ++k)
    sum += rule.weights[k] * f(rule.times[k], x, mu);
  return sum;
}

}  // namespace

AveragedField::AveragedField(const SemilinearProblem& problem, int nodes) {
  if (nodes <= 0) nodes = 64;
  // Copy: the evaluator must not dangle when the source problem dies
  // (problem copies share the operator).
  f_ = [p = problem](double t, const Vector& x, double mu) {
    return p.f(t, x, mu);
  };
  Rule rule = composite_rule(problem.period(), nodes);
  Rule doubled = composite_rule(problem.period(), 2 * nodes);
  Vector probe = Vector::Zero(problem.op().dim());
  error_estimate_ =
      (quadrature(f_, rule, probe, 1.0) - quadrature(f_, doubled, probe, 1.0))
          .norm();
  times_ = std::move(rule.times);
  weights_ = std::move(rule.weights);
}

Vector AveragedField::operator()(const Vector& x) const {
  return evaluate(x, 1.0);
}

Vector AveragedField::evaluate(const Vector& x, double mu) const {
  Vector sum = weights_[0] * f_(times_[0], x, mu);
  for (std::size_t k = 1; k < times_.size(); ++k)
    sum += weights_[k] * f_(times_[k], x, mu);
  return sum;
}

AveragedField average_field(const SemilinearProblem& problem, int nodes) {
  return AveragedField(problem, nodes);
}

SemilinearProblem averaged_problem(const SemilinearProblem& problem,
                                   int nodes) {
  auto averaged = std::make_shared<AveragedField>(problem, nodes);
  SemilinearProblem::Constants constants;
  constants.period = problem.period();
  constants.lipschitz = problem.lipschitz();
  constants.growth = problem.growth();
  constants.bound = problem.bound();
  constants.periodic = true;
  constants.autonomous = true;
  constants.sample_radius = problem.sample_radius();
  return problem.with_field(
      [averaged](double, const Vector& x, double mu) {
        return averaged->evaluate(x, mu);
      },
      constants, problem.name().empty() ? "averaged" : problem.name() + "-averaged");
}

}  // namespace flowdeg
