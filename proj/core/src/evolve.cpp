#include "flowdeg/evolve.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace flowdeg {

namespace detail {

/// e^{-sA} together with phi_1(-sA) (the Duhamel weight), computed in one
/// augmented exponential and memoized by the bit pattern of s.
struct StepMatrices {
  Matrix propagator;  // e^{-sA}
  Matrix phi1;        // (I - e^{-sA}) (sA)^{-1}, defined by series at s = 0
};

class PropagatorCache {
 public:
  explicit PropagatorCache(const LinearOperator& op) : op_(&op) {}

  std::shared_ptr<const StepMatrices> get(double s) {
    const std::uint64_t key = std::bit_cast<std::uint64_t>(s);
    {
      std::scoped_lock lock(mutex_);
      auto it = entries_.find(key);
      if (it != entries_.end()) return it->second;
    }
    auto computed = std::make_shared<StepMatrices>(compute(s));
    std::scoped_lock lock(mutex_);
    if (entries_.size() > kMaxEntries) entries_.clear();
    return entries_.try_emplace(key, std::move(computed)).first->second;
  }

 private:
  StepMatrices compute(double s) const {
    const Eigen::Index n = op_->dim();
    if (s == 0.0)
      return {Matrix::Identity(n, n), Matrix::Identity(n, n)};
    // exp of [[-sA, I], [0, 0]] = [[e^{-sA}, phi_1(-sA)], [0, I]].
    Matrix augmented = Matrix::Zero(2 * n, 2 * n);
    augmented.topLeftCorner(n, n) = -s * op_->matrix();
    augmented.topRightCorner(n, n) = Matrix::Identity(n, n);
    Matrix e = augmented.exp();
    return {e.topLeftCorner(n, n), e.topRightCorner(n, n)};
  }

  static constexpr std::size_t kMaxEntries = 64;
  const LinearOperator* op_;
  std::map<std::uint64_t, std::shared_ptr<const StepMatrices>> entries_;
  std::mutex mutex_;
};

}  // namespace detail

SemilinearProblem::SemilinearProblem(LinearOperator op, Nonlinearity f,
                                     Constants constants, std::string name)
    : op_(std::make_shared<const LinearOperator>(std::move(op))),
      f_(std::move(f)),
      constants_(constants),
      name_(std::move(name)),
      cache_(std::make_shared<detail::PropagatorCache>(*op_)) {
  if (!(constants_.period > 0.0))
    throw DomainError("problem: period must be > 0");
  if (constants_.lipschitz < 0.0 || constants_.growth < 0.0)
    throw DomainError("problem: constants must be >= 0");
  if (!f_) throw DomainError("problem: missing nonlinearity");
}

Vector SemilinearProblem::f(double t, const Vector& x, double mu) const {
  Vector value = f_(t, x, mu);
  if (value.size() != op_->dim())
    throw DomainError("problem: nonlinearity dimension mismatch");
  return value;
}

SemilinearProblem SemilinearProblem::with_field(Nonlinearity f,
                                                Constants constants,
                                                std::string name) const {
  SemilinearProblem copy = *this;
  copy.f_ = std::move(f);
  copy.constants_ = constants;
  copy.name_ = std::move(name);
  if (!(copy.constants_.period > 0.0))
    throw DomainError("problem: period must be > 0");
  if (!copy.f_) throw DomainError("problem: missing nonlinearity");
  return copy;
}

namespace {

int auto_steps(const SemilinearProblem& problem, double horizon,
               double lambda) {
  double per_period = 256.0 * horizon / problem.period();
  int steps = std::max(16, static_cast<int>(std::ceil(per_period)));
  // Raise the default until the stability guard h lambda L_F <= 0.5 holds.
  double guard = lambda * problem.lipschitz() * horizon;
  if (guard > 0.0)
    steps = std::max(steps, static_cast<int>(std::ceil(guard / 0.5)));
  return steps;
}

struct PassResult {
  Vector final_state;
  double residual = 0.0;       // relative
  double apriori_bound = 0.0;
  bool apriori_ok = true;
};

// One fixed-step integration pass.  Collects states into `out` when given.
PassResult single_pass(const SemilinearProblem& problem, const Vector& x0,
                       double horizon, double lambda, double mu, int steps,
                       const IntegrateOptions& options,
                       std::vector<Vector>* out) {
  const LinearOperator& op = problem.op();
  const double h = horizon / steps;
  const double s = lambda * h;
  auto full = problem.propagators().get(s);
  auto half = problem.propagators().get(0.5 * s);
  const Matrix& e_full = full->propagator;
  const Matrix& p_full = full->phi1;
  const Matrix& e_half = half->propagator;
  const Matrix& p_half = half->phi1;

  // Defects propagate through the flow with factor e^{lambda (L_F - omega) h}
  // per step (Gronwall).
  const double decay =
      std::exp(lambda * (problem.lipschitz() - op.decay_rate()) * h);

  PassResult result;
  Vector u = x0;
  Vector g0 = lambda * problem.f(0.0, u, mu);
  double accumulated_defect = 0.0;
  double max_defect = 0.0;
  double max_norm = op.weighted_norm(u);

  if (out) {
    out->clear();
    out->reserve(steps + 1);
    out->push_back(u);
  }

  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    Vector eu = e_full * u;
    Vector mid = e_half * u + (0.5 * h) * (p_half * g0);
    Vector gm = lambda * problem.f(t + 0.5 * h, mid, mu);
    Vector next = eu + h * (p_full * gm);
    Vector g1 = lambda * problem.f(t + h, next, mu);

    // Duhamel defect of the step against a Simpson quadrature of the
    // forcing integral on the half-step grid.
    Vector quad = (h / 6.0) * (e_full * g0 + 4.0 * (e_half * gm) + g1);
    double defect = op.weighted_norm(next - eu - quad);
    accumulated_defect = accumulated_defect * decay + defect;
    max_defect = std::max(max_defect, accumulated_defect);

    double norm = op.weighted_norm(next);
    max_norm = std::max(max_norm, norm);
    if (norm > options.blowup)
      throw BlowUpError("integrate: state norm exceeded blow-up threshold " +
                            std::to_string(options.blowup) + " at t = " +
                            std::to_string(t + h),
                        t + h);

    u = std::move(next);
    g0 = std::move(g1);
    if (out) out->push_back(u);
  }

  result.final_state = std::move(u);
  result.residual = max_defect / (1.0 + max_norm);

  // A-priori growth bound from the declared constants (valid for any
  // contraction amplification G >= e^{-min(omega,0) lambda S}).
  const double span = horizon;
  const double amplify =
      std::exp(-std::min(op.decay_rate(), 0.0) * lambda * span);
  const double c_gain = lambda * problem.growth() * span;
  result.apriori_bound = amplify *
                         (op.weighted_norm(x0) + c_gain) *
                         std::exp(c_gain * amplify);
  result.apriori_ok = max_norm <= result.apriori_bound + 1e-6;
  return result;
}

struct IntegrationOutcome {
  PassResult pass;
  int steps = 0;
  bool refined = false;
};

IntegrationOutcome run_integration(const SemilinearProblem& problem,
                                   const Vector& x0, double horizon,
                                   double lambda, double mu, int steps,
                                   const IntegrateOptions& options,
                                   std::vector<Vector>* out) {
  if (horizon < 0.0) throw DomainError("integrate: horizon must be >= 0");
  if (lambda < 0.0) throw DomainError("integrate: lambda must be >= 0");
  if (x0.size() != problem.op().dim())
    throw DomainError("integrate: initial state dimension mismatch");
  if (steps < 0) throw DomainError("integrate: steps must be >= 0");

  IntegrationOutcome outcome;
  if (horizon == 0.0) {
    outcome.pass.final_state = x0;
    outcome.pass.apriori_bound = problem.op().weighted_norm(x0);
    if (out) *out = {x0};
    return outcome;
  }

  if (steps == 0) {
    steps = auto_steps(problem, horizon, lambda);
  } else {
    double guard = lambda * problem.lipschitz() * horizon / steps;
    if (guard > 0.5)
      throw ConfigError(
          "integrate: step guard violated, h * lambda * L_F = " +
          std::to_string(guard) + " > 0.5; use at least " +
          std::to_string(static_cast<int>(
              std::ceil(lambda * problem.lipschitz() * horizon / 0.5))) +
          " steps");
  }

  for (;;) {
    outcome.pass =
        single_pass(problem, x0, horizon, lambda, mu, steps, options, out);
    outcome.steps = steps;
    if (!options.refine || outcome.pass.residual <= options.tolerance) return outcome;
    if (2 * steps > options.max_steps)
      throw ToleranceError(
          "integrate: residual " + std::to_string(outcome.pass.residual) +
          " above tolerance " + std::to_string(options.tolerance) +
          " at the step cap " + std::to_string(options.max_steps));
    steps *= 2;
    outcome.refined = true;
  }
}

}  // namespace

Trajectory integrate_mild(const SemilinearProblem& problem, const Vector& x0,
                          double horizon, double lambda, double mu, int steps,
                          const IntegrateOptions& options) {
  std::vector<Vector> states;
  IntegrationOutcome outcome = run_integration(problem, x0, horizon, lambda,
                                               mu, steps, options, &states);
  Trajectory trajectory;
  trajectory.states = std::move(states);
  const int n = static_cast<int>(trajectory.states.size()) - 1;
  trajectory.times.resize(n + 1);
  for (int k = 0; k <= n; ++k)
    trajectory.times[k] = horizon * static_cast<double>(k) /
                          std::max(1, n);
  trajectory.lambda = lambda;
  trajectory.mu = mu;
  trajectory.residual = outcome.pass.residual;
  trajectory.tolerance = options.refine ? options.tolerance : 0.0;
  trajectory.refined = options.refine;
  trajectory.apriori_bound = outcome.pass.apriori_bound;
  trajectory.apriori_ok = outcome.pass.apriori_ok;
  return trajectory;
}

Vector translate(const SemilinearProblem& problem, const Vector& x, double t,
                 double lambda, double mu, int steps,
                 const IntegrateOptions& options) {
  return run_integration(problem, x, t, lambda, mu, steps, options, nullptr)
      .pass.final_state;
}

namespace detail {

TranslateResult translate_ex(const SemilinearProblem& problem, const Vector& x,
                             double t, double lambda, double mu, int steps,
                             const IntegrateOptions& options) {
  IntegrationOutcome outcome =
      run_integration(problem, x, t, lambda, mu, steps, options, nullptr);
  return {std::move(outcome.pass.final_state), outcome.steps,
          outcome.pass.residual};
}

}  // namespace detail

double local_existence_horizon(double bound_k, double rho) {
  if (!(bound_k > 0.0) || !(rho > 0.0))
    throw DomainError("existence horizon: K and rho must be > 0");
  return rho / (4.0 * bound_k);
}

double flow_lipschitz_estimate(const SemilinearProblem& problem, double t,
                               const Region& region, int pairs, double lambda,
                               double mu, std::uint64_t seed,
                               const IntegrateOptions& options) {
  if (pairs <= 0) throw DomainError("flow estimate: pairs must be > 0");
  if (region.dim() != problem.op().dim())
    throw DomainError("flow estimate: region dimension mismatch");
  const LinearOperator& op = problem.op();
  const double min_separation = 1e-3 * region.diameter();
  std::uint64_t state = detail::seed_state(seed);

  auto random_point = [&](std::size_t) {
    if (region.kind() == Region::Kind::box) {
      Vector x(region.dim());
      for (int i = 0; i < region.dim(); ++i)
        x[i] = region.lower()[i] +
               detail::uniform01(state) *
                   (region.upper()[i] - region.lower()[i]);
      return x;
    }
    // Gaussian direction, volume-uniform radius.
    Vector g(region.dim());
    for (int i = 0; i < region.dim(); i += 2) {
      double u1 = std::max(detail::uniform01(state), 1e-300);
      double u2 = detail::uniform01(state);
      double r = std::sqrt(-2.0 * std::log(u1));
      g[i] = r * std::cos(2.0 * std::numbers::pi * u2);
      if (i + 1 < region.dim()) g[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    double gn = g.norm();
    if (gn == 0.0) g.setOnes(), gn = g.norm();
    double rho = region.radius() *
                 std::pow(detail::uniform01(state),
                          1.0 / static_cast<double>(region.dim()));
    Vector dir = g / gn;
    if (region.has_metric()) {
      Eigen::LLT<Matrix> llt(region.metric());
      dir = Matrix(llt.matrixU())
                .triangularView<Eigen::Upper>()
                .solve(dir);
    }
    return Vector(region.center() + rho * dir);
  };

  double worst = 0.0;
  int steps_hint = 0;
  for (int p = 0; p < pairs; ++p) {
    Vector x = random_point(0);
    Vector y = random_point(0);
    for (int tries = 0; tries < 64 && (x - y).norm() < min_separation; ++tries)
      y = random_point(0);
    double separation = op.weighted_norm(x - y);
    if (separation == 0.0) continue;
    auto fx = detail::translate_ex(problem, x, t, lambda, mu, steps_hint, options);
    auto fy = detail::translate_ex(problem, y, t, lambda, mu, fx.steps, options);
    steps_hint = fy.steps;
    double quotient = op.weighted_norm(fx.state - fy.state) / separation;
    worst = std::max(worst, quotient);
  }
  return worst;
}

namespace {

void write_double(std::ostream& out, double value) {
  char buffer[64];
  auto r = std::to_chars(buffer, buffer + sizeof buffer, value);
  out.write(buffer, r.ptr - buffer);
}

}  // namespace

void trajectory_to_csv(const std::filesystem::path& path,
                       const Trajectory& trajectory) {
  if (trajectory.times.empty())
    throw DomainError("trajectory csv: empty trajectory");
  std::ofstream out(path);
  if (!out) throw DomainError("trajectory csv: cannot write " + path.string());
  const Eigen::Index n = trajectory.states.front().size();
  out << 't';
  for (Eigen::Index j = 0; j < n; ++j) out << ",x_" << (j + 1);
  out << '\n';
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    write_double(out, trajectory.times[k]);
    for (Eigen::Index j = 0; j < n; ++j) {
      out.put(',');
      write_double(out, trajectory.states[k][j]);
    }
    out.put('\n');
  }
}

Trajectory trajectory_from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("trajectory csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw DomainError("trajectory csv: missing header");
  std::size_t columns = 1 + static_cast<std::size_t>(
                                std::count(line.begin(), line.end(), ','));
  if (columns < 2 || line.substr(0, 2) != "t,")
    throw DomainError("trajectory csv: bad header, expected t,x_1,...");
  Trajectory trajectory;
  const Eigen::Index n = static_cast<Eigen::Index>(columns) - 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0.0;
    Vector x(n);
    if (!(row >> t)) throw DomainError("trajectory csv: bad row");
    for (Eigen::Index j = 0; j < n; ++j)
      if (!(row >> x[j])) throw DomainError("trajectory csv: short row");
    trajectory.times.push_back(t);
    trajectory.states.push_back(std::move(x));
  }
  if (trajectory.times.empty())
    throw DomainError("trajectory csv: no data rows");
  return trajectory;
}

}  // namespace flowdeg
