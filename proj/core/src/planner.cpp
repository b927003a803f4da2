#include "intentgrasp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "intentgrasp/errors.hpp"

namespace intentgrasp {

std::string to_string(SolverStrategy s) {
  switch (s) {
    case SolverStrategy::ProjectedGradient:
      return "projected-gradient";
    case SolverStrategy::AugmentedLagrangian:
      return "augmented-lagrangian";
  }
  return "unknown";
}

SolverStrategy parse_solver(const std::string& name) {
  if (name == "projected-gradient" || name == "pgd" || name == "a") {
    return SolverStrategy::ProjectedGradient;
  }
  if (name == "augmented-lagrangian" || name == "alm" || name == "b") {
    return SolverStrategy::AugmentedLagrangian;
  }
  throw ValidationError("unknown solver '" + name + "' (expected projected-gradient or augmented-lagrangian)");
}

namespace {

void check_target(const MultiTaskModel& model, const std::vector<double>& target) {
  if (target.size() != model.class_count()) {
    throw DimensionMismatch("target probability vector", model.class_count(), target.size());
  }
}

Vector target_as_vector(const std::vector<double>& target) {
  return Eigen::Map<const Vector>(target.data(), static_cast<Eigen::Index>(target.size()));
}

}  // namespace

double objective(const MultiTaskModel& model, const std::vector<double>& target, const Vector& x) {
  check_target(model, target);
  const Vector p = posterior_vector(model, x);
  return 0.5 * (target_as_vector(target) - p).squaredNorm();
}

Matrix posterior_jacobian(const MultiTaskModel& model, const Vector& x) {
  const Vector p = posterior_vector(model, x);
  const auto K = static_cast<Eigen::Index>(model.class_count());
  const auto d = static_cast<Eigen::Index>(model.dim());
  Matrix grads(K, d);
  for (Eigen::Index k = 0; k < K; ++k) {
    grads.row(k) = model.classes()[static_cast<std::size_t>(k)].gaussian.log_pdf_gradient(x).transpose();
  }
  const Eigen::RowVectorXd mean_grad = p.transpose() * grads;
  Matrix jac = grads.rowwise() - mean_grad;
  jac.array().colwise() *= p.array();
  return jac;
}

Vector objective_gradient(const MultiTaskModel& model, const std::vector<double>& target,
                          const Vector& x) {
  check_target(model, target);
  const Vector residual = target_as_vector(target) - posterior_vector(model, x);
  return -posterior_jacobian(model, x).transpose() * residual;
}

Bounds default_bounds(const MultiTaskModel& model) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  Bounds b{Vector(d), Vector(d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& feature = model.schema()[static_cast<std::size_t>(i)];
    double lo;
    double hi;
    if (feature.observed_range) {
      lo = feature.observed_range->first;
      hi = feature.observed_range->second;
    } else {
      lo = std::numeric_limits<double>::infinity();
      hi = -lo;
      for (const auto& c : model.classes()) {
        const double sd = std::sqrt(c.gaussian.covariance()(i, i));
        lo = std::min(lo, c.gaussian.mean()[i] - 4.0 * sd);
        hi = std::max(hi, c.gaussian.mean()[i] + 4.0 * sd);
      }
    }
    const double range = hi - lo;
    b.lower[i] = lo - 0.5 * range;
    b.upper[i] = hi + 0.5 * range;
  }
  return b;
}

std::vector<std::size_t> rank_initial_indices(const MultiTaskModel& model, const std::vector<double>& target,
                                              const std::vector<LabeledSample>& candidates, std::size_t count) {
  if (candidates.empty()) throw ValidationError("initial pose selection needs at least one candidate");
  check_target(model, target);
  const std::size_t best_class = argmax_with_tie_rule(target_as_vector(target), model.layout());
  const TaskSet wanted = model.layout().zone(best_class);

  std::vector<std::tuple<bool, double, std::size_t>> keyed;
  keyed.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    keyed.emplace_back(!candidates[i].zone.is_superset_of(wanted), objective(model, target, candidates[i].x), i);
  }
  std::stable_sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> ranked;
  for (std::size_t i = 0; i < std::min(count, keyed.size()); ++i) ranked.push_back(std::get<2>(keyed[i]));
  return ranked;
}

std::size_t select_initial_index(const MultiTaskModel& model, const std::vector<double>& target,
                                 const std::vector<LabeledSample>& candidates) {
  return rank_initial_indices(model, target, candidates, 1).front();
}

Vector select_initial_pose(const MultiTaskModel& model, const std::vector<double>& target,
                           const std::vector<LabeledSample>& candidates) {
  return candidates[select_initial_index(model, target, candidates)].x;
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kChangeWindow = 10;

/// Objective and constraints in scaled coordinates z = x / s, with one
/// common scale per unit-norm group so each group's sphere stays a sphere.
class ScaledProblem {
 public:
  ScaledProblem(const MultiTaskModel& model, std::vector<double> target, const Bounds& bounds,
                std::vector<std::vector<std::size_t>> groups)
      : model_(model), target_(std::move(target)), groups_(std::move(groups)) {
    const auto d = static_cast<Eigen::Index>(model.dim());
    scale_ = Vector::Zero(d);
    for (const auto& c : model.classes()) scale_ += c.gaussian.covariance().diagonal();
    scale_ = (scale_ / static_cast<double>(model.class_count())).cwiseSqrt();
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!(scale_[i] > 0.0) || !std::isfinite(scale_[i])) scale_[i] = 1.0;
    }
    in_group_.assign(static_cast<std::size_t>(d), false);
    for (const auto& g : groups_) {
      double s = 0.0;
      for (auto i : g) s += scale_[static_cast<Eigen::Index>(i)];
      s /= static_cast<double>(g.size());
      for (auto i : g) {
        scale_[static_cast<Eigen::Index>(i)] = s;
        in_group_[i] = true;
      }
      radius_.push_back(1.0 / s);
    }
    lower_ = bounds.lower.cwiseQuotient(scale_);
    upper_ = bounds.upper.cwiseQuotient(scale_);
  }

  Eigen::Index dim() const { return scale_.size(); }
  const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
  double radius(std::size_t g) const { return radius_[g]; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  Vector to_x(const Vector& z) const { return z.cwiseProduct(scale_); }
  Vector to_z(const Vector& x) const { return x.cwiseQuotient(scale_); }

  double value(const Vector& z) const { return objective(model_, target_, to_x(z)); }
  Vector gradient(const Vector& z) const {
    return objective_gradient(model_, target_, to_x(z)).cwiseProduct(scale_);
  }
  /// ∂P/∂z, K×d.
  Matrix jacobian(const Vector& z) const {
    return posterior_jacobian(model_, to_x(z)) * scale_.asDiagonal();
  }

  /// Clamp free coordinates; alternate sphere normalization and clamping per
  /// group. Returns nullopt when a group cannot be placed on its sphere
  /// inside the box.
  std::optional<Vector> project(const Vector& z) const {
    Vector out = z;
    for (Eigen::Index i = 0; i < dim(); ++i) {
      if (!in_group_[static_cast<std::size_t>(i)]) out[i] = std::clamp(out[i], lower_[i], upper_[i]);
    }
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& idx = groups_[g];
      const double r = radius_[g];
      Vector y(static_cast<Eigen::Index>(idx.size()));
      Vector lo(y.size());
      Vector hi(y.size());
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto i = static_cast<Eigen::Index>(idx[j]);
        y[static_cast<Eigen::Index>(j)] = out[i];
        lo[static_cast<Eigen::Index>(j)] = lower_[i];
        hi[static_cast<Eigen::Index>(j)] = upper_[i];
      }
      bool placed = false;
      for (int iter = 0; iter < 1000 && !placed; ++iter) {
        double n = y.norm();
        if (!(n > 1e-300)) {
          y = 0.5 * (lo + hi);
          n = y.norm();
          if (!(n > 1e-300)) {
            y = Vector::Unit(y.size(), 0);
            n = 1.0;
          }
        }
        y *= r / n;
        const Vector clamped = y.cwiseMax(lo).cwiseMin(hi);
        if ((clamped - y).norm() <= 1e-13 * r) {
          placed = true;
        } else {
          y = clamped;
        }
      }
      if (!placed) return std::nullopt;
      for (std::size_t j = 0; j < idx.size(); ++j) out[static_cast<Eigen::Index>(idx[j])] = y[static_cast<Eigen::Index>(j)];
    }
    return out;
  }

  /// Removes the radial component of g on every unit-norm group at z.
  Vector tangential(const Vector& z, Vector g) const {
    for (const auto& group : groups_) {
      double gz = 0.0;
      double zz = 0.0;
      for (auto i : group) {
        const auto ii = static_cast<Eigen::Index>(i);
        gz += g[ii] * z[ii];
        zz += z[ii] * z[ii];
      }
      if (!(zz > 0.0)) continue;
      for (auto i : group) {
        const auto ii = static_cast<Eigen::Index>(i);
        g[ii] -= gz / zz * z[ii];
      }
    }
    return g;
  }

  bool feasible_x(const Vector& x, const Bounds& bounds) const {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < bounds.lower[i] - 1e-9 || x[i] > bounds.upper[i] + 1e-9) return false;
    }
    for (const auto& g : groups_) {
      double sq = 0.0;
      for (auto i : g) sq += x[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
      if (std::abs(std::sqrt(sq) - 1.0) > 1e-9) return false;
    }
    return true;
  }

 private:
  const MultiTaskModel& model_;
  std::vector<double> target_;
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<bool> in_group_;
  std::vector<double> radius_;
  Vector scale_;
  Vector lower_;
  Vector upper_;
};

struct SolveOutcome {
  Vector z;
  std::size_t iterations = 0;
  std::vector<double> trace;
  bool converged = false;
  std::string termination;
};

class Deadline {
 public:
  explicit Deadline(std::optional<std::chrono::milliseconds> budget)
      : end_(budget ? std::optional(Clock::now() + *budget) : std::nullopt) {}
  bool expired() const { return end_ && Clock::now() >= *end_; }

 private:
  std::optional<Clock::time_point> end_;
};

/// Orthonormal basis of the tangent space of the unit-norm groups at z.
Matrix tangent_basis(const ScaledProblem& sp, const Vector& z) {
  const auto n = sp.dim();
  const auto reduced = n - static_cast<Eigen::Index>(sp.groups().size());
  Matrix basis = Matrix::Zero(n, reduced);
  std::vector<bool> grouped(static_cast<std::size_t>(n), false);
  Eigen::Index col = 0;
  for (const auto& group : sp.groups()) {
    const auto m = static_cast<Eigen::Index>(group.size());
    Vector radial(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      radial[j] = z[static_cast<Eigen::Index>(group[static_cast<std::size_t>(j)])];
      grouped[group[static_cast<std::size_t>(j)]] = true;
    }
    // Columns 1..m-1 of the Householder Q of the radial direction span its complement.
    const Matrix q = Eigen::HouseholderQR<Matrix>(radial).householderQ() * Matrix::Identity(m, m);
    for (Eigen::Index c = 1; c < m; ++c, ++col) {
      for (Eigen::Index j = 0; j < m; ++j) {
        basis(static_cast<Eigen::Index>(group[static_cast<std::size_t>(j)]), col) = q(j, c);
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!grouped[static_cast<std::size_t>(i)]) basis(i, col++) = 1.0;
  }
  return basis;
}

SolveOutcome projected_gradient(const ScaledProblem& sp, const Vector& z0, const PlanConfig& cfg,
                                const Deadline& deadline) {
  SolveOutcome out;
  Vector z = z0;
  double f = sp.value(z);
  out.trace.push_back(f);
  const bool gauss_newton = cfg.curvature == CurvatureModel::GaussNewton;
  double trial_step = cfg.initial_step;
  double damping = 1e-3;  // relative Levenberg-Marquardt damping
  Vector previous_z;
  Vector previous_g;
  while (true) {
    if (out.iterations >= cfg.max_iterations) {
      out.termination = "max_iterations";
      break;
    }
    if (deadline.expired()) {
      out.termination = "time_limit";
      break;
    }
    const Vector g = sp.tangential(z, sp.gradient(z));
    const auto unit_step = sp.project(z - g);
    const double stationarity = unit_step ? (z - *unit_step).norm() : g.norm();
    if (stationarity < cfg.gradient_tolerance) {
      out.converged = true;
      out.termination = out.iterations == 0 ? "stationary_start" : "gradient";
      break;
    }

    Vector direction;
    double step = cfg.initial_step;
    if (gauss_newton) {
      // Damped Gauss-Newton metric on the tangent space; the projected
      // search below is unchanged.
      const Matrix basis = tangent_basis(sp, z);
      const Matrix jr = sp.jacobian(z) * basis;
      Matrix normal = jr.transpose() * jr;
      const double mean_diag = std::max(normal.trace() / static_cast<double>(normal.rows()), 1e-300);
      normal.diagonal().array() += damping * mean_diag;
      direction = -basis * normal.ldlt().solve(basis.transpose() * g);
      if (!(g.dot(direction) < 0.0) || !direction.allFinite()) direction = -g;
      if (const double len = direction.norm(); len > cfg.max_step) direction *= cfg.max_step / len;
    } else {
      // Barzilai-Borwein trial step from the last accepted move.
      if (previous_z.size() == z.size()) {
        const Vector s = z - previous_z;
        const Vector y = g - previous_g;
        const double sy = s.dot(y);
        trial_step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-10, 1e10)
                              : std::min(trial_step * 2.0, 1e10);
      }
      step = trial_step;
      direction = -g;
    }

    // Armijo backtracking along the projection arc keeps the trace monotone.
    std::optional<Vector> accepted;
    double f_new = f;
    bool backtracked = false;
    while (step > 1e-20) {
      const auto trial = sp.project(z + step * direction);
      if (trial) {
        const double f_trial = sp.value(*trial);
        if (f_trial <= f + cfg.armijo_c * g.dot(*trial - z)) {
          accepted = trial;
          f_new = f_trial;
          break;
        }
      }
      step *= cfg.step_shrink;
      backtracked = true;
    }
    if (gauss_newton) damping = backtracked ? std::min(damping * 4.0, 1e6) : std::max(damping / 3.0, 1e-12);
    if (!accepted) {
      // No representable decrease along the projected arc: numerically stationary.
      out.converged = stationarity < std::sqrt(cfg.gradient_tolerance);
      out.termination = "line_search";
      break;
    }
    ++out.iterations;
    const double change = f - f_new;
    previous_z = z;
    previous_g = g;
    trial_step = step;
    z = *accepted;
    f = f_new;
    out.trace.push_back(f);
    // A single backtracked step can decrease very little far from a minimum,
    // so the change is measured across the last few accepted steps.
    const std::size_t n = out.trace.size();
    const double window_change = n > kChangeWindow ? out.trace[n - 1 - kChangeWindow] - f : change + 1.0;
    if (window_change < cfg.objective_tolerance) {
      out.converged = true;
      out.termination = "objective_change";
      break;
    }
  }
  out.z = std::move(z);
  return out;
}

/// Equality constraints ||x_g||² − 1 = 0 and box inequalities, handled with
/// PHR multipliers; each subproblem is minimized by BFGS with Armijo steps.
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const ScaledProblem& sp) : sp_(sp) {
    eq_mult_ = Vector::Zero(static_cast<Eigen::Index>(sp.groups().size()));
    lower_mult_ = Vector::Zero(sp.dim());
    upper_mult_ = Vector::Zero(sp.dim());
  }

  double penalty() const { return rho_; }
  void increase_penalty() { rho_ = std::min(rho_ * 10.0, 1e12); }

  Vector equality(const Vector& z) const {
    Vector h(static_cast<Eigen::Index>(sp_.groups().size()));
    for (std::size_t g = 0; g < sp_.groups().size(); ++g) {
      double sq = 0.0;
      for (auto i : sp_.groups()[g]) sq += z[static_cast<Eigen::Index>(i)] * z[static_cast<Eigen::Index>(i)];
      const double r = sp_.radius(g);
      h[static_cast<Eigen::Index>(g)] = sq / (r * r) - 1.0;
    }
    return h;
  }

  double value(const Vector& z) const {
    double v = sp_.value(z);
    const Vector h = equality(z);
    v += eq_mult_.dot(h) + 0.5 * rho_ * h.squaredNorm();
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      v += inequality_term(lower_mult_[i], sp_.lower()[i] - z[i]);
      v += inequality_term(upper_mult_[i], z[i] - sp_.upper()[i]);
    }
    return v;
  }

  Vector gradient(const Vector& z) const {
    Vector grad = sp_.gradient(z);
    const Vector h = equality(z);
    for (std::size_t g = 0; g < sp_.groups().size(); ++g) {
      const double r = sp_.radius(g);
      const double coef = eq_mult_[static_cast<Eigen::Index>(g)] + rho_ * h[static_cast<Eigen::Index>(g)];
      for (auto i : sp_.groups()[g]) {
        grad[static_cast<Eigen::Index>(i)] += coef * 2.0 * z[static_cast<Eigen::Index>(i)] / (r * r);
      }
    }
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      grad[i] -= std::max(0.0, lower_mult_[i] + rho_ * (sp_.lower()[i] - z[i]));
      grad[i] += std::max(0.0, upper_mult_[i] + rho_ * (z[i] - sp_.upper()[i]));
    }
    return grad;
  }

  /// Gauss-Newton model of the objective plus the exact Hessian of the penalty terms.
  Matrix gauss_newton_hessian(const Vector& z) const {
    const Matrix jz = sp_.jacobian(z);
    Matrix hess = jz.transpose() * jz;
    const Vector h = equality(z);
    for (std::size_t g = 0; g < sp_.groups().size(); ++g) {
      const double r2 = sp_.radius(g) * sp_.radius(g);
      const double coef = eq_mult_[static_cast<Eigen::Index>(g)] + rho_ * h[static_cast<Eigen::Index>(g)];
      for (auto i : sp_.groups()[g]) {
        const auto ii = static_cast<Eigen::Index>(i);
        hess(ii, ii) += 2.0 * coef / r2;
        for (auto j : sp_.groups()[g]) {
          const auto jj = static_cast<Eigen::Index>(j);
          hess(ii, jj) += rho_ * 4.0 * z[ii] * z[jj] / (r2 * r2);
        }
      }
    }
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (lower_mult_[i] + rho_ * (sp_.lower()[i] - z[i]) > 0.0) hess(i, i) += rho_;
      if (upper_mult_[i] + rho_ * (z[i] - sp_.upper()[i]) > 0.0) hess(i, i) += rho_;
    }
    return hess;
  }

  /// Max of |h|, positive box violation and complementarity.
  double violation(const Vector& z) const {
    double worst = sp_.groups().empty() ? 0.0 : equality(z).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double cl = sp_.lower()[i] - z[i];
      const double cu = z[i] - sp_.upper()[i];
      worst = std::max(worst, std::abs(std::max(cl, -lower_mult_[i] / rho_)));
      worst = std::max(worst, std::abs(std::max(cu, -upper_mult_[i] / rho_)));
    }
    return worst;
  }

  void update_multipliers(const Vector& z) {
    eq_mult_ += rho_ * equality(z);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      lower_mult_[i] = std::max(0.0, lower_mult_[i] + rho_ * (sp_.lower()[i] - z[i]));
      upper_mult_[i] = std::max(0.0, upper_mult_[i] + rho_ * (z[i] - sp_.upper()[i]));
    }
  }

 private:
  double inequality_term(double mult, double c) const {
    const double t = std::max(0.0, mult + rho_ * c);
    return (t * t - mult * mult) / (2.0 * rho_);
  }

  const ScaledProblem& sp_;
  Vector eq_mult_;
  Vector lower_mult_;
  Vector upper_mult_;
  double rho_ = 10.0;
};

SolveOutcome augmented_lagrangian(const ScaledProblem& sp, const Vector& z0, const PlanConfig& cfg,
                                  const Deadline& deadline) {
  SolveOutcome out;
  AugmentedLagrangian al(sp);
  Vector z = z0;
  out.trace.push_back(sp.value(z));
  const auto n = sp.dim();
  double previous_violation = std::numeric_limits<double>::infinity();
  bool budget_exhausted = false;

  for (int outer = 0; outer < 60 && !budget_exhausted; ++outer) {
    // Damped Gauss-Newton or BFGS on the current augmented Lagrangian.
    const bool gauss_newton = cfg.curvature == CurvatureModel::GaussNewton;
    double damping = 1e-3;
    Matrix h_inv = Matrix::Identity(n, n);
    double value = al.value(z);
    Vector grad = al.gradient(z);
    bool inner_converged = false;
    bool reset_once = false;
    while (true) {
      if (grad.norm() < cfg.gradient_tolerance) {
        inner_converged = true;
        break;
      }
      if (out.iterations >= cfg.max_iterations) {
        out.termination = "max_iterations";
        budget_exhausted = true;
        break;
      }
      if (deadline.expired()) {
        out.termination = "time_limit";
        budget_exhausted = true;
        break;
      }
      Vector dir;
      if (gauss_newton) {
        Matrix hess = al.gauss_newton_hessian(z);
        const double mean_diag = std::max(hess.diagonal().cwiseAbs().mean(), 1e-300);
        hess.diagonal().array() += damping * mean_diag;
        dir = -hess.ldlt().solve(grad);
        if (!dir.allFinite()) dir = -grad;
      } else {
        dir = -h_inv * grad;
      }
      if (!(grad.dot(dir) < 0.0)) {
        h_inv.setIdentity();
        dir = -grad;
      }
      if (const double len = dir.norm(); len > cfg.max_step) dir *= cfg.max_step / len;
      const double slope = grad.dot(dir);
      double step = cfg.initial_step;
      Vector trial;
      double trial_value = value;
      bool accepted = false;
      bool backtracked = false;
      while (step > 1e-20) {
        trial = z + step * dir;
        trial_value = al.value(trial);
        if (trial_value <= value + cfg.armijo_c * step * slope) {
          accepted = true;
          break;
        }
        step *= cfg.step_shrink;
        backtracked = true;
      }
      if (gauss_newton) damping = backtracked ? std::min(damping * 4.0, 1e6) : std::max(damping / 3.0, 1e-12);
      if (!accepted) {
        if (!reset_once) {
          // Retry once with a fresh curvature model before calling the point stalled.
          h_inv.setIdentity();
          damping = 1.0;
          reset_once = true;
          continue;
        }
        inner_converged = true;  // no representable decrease left at this penalty
        break;
      }
      reset_once = false;
      ++out.iterations;
      const Vector trial_grad = al.gradient(trial);
      const Vector s = trial - z;
      const Vector y = trial_grad - grad;
      const double sy = s.dot(y);
      if (!gauss_newton && sy > 1e-12 * s.norm() * y.norm()) {
        const double rho = 1.0 / sy;
        const Matrix I = Matrix::Identity(n, n);
        h_inv = (I - rho * s * y.transpose()) * h_inv * (I - rho * y * s.transpose()) +
                rho * s * s.transpose();
      }
      z = trial;
      value = trial_value;
      grad = trial_grad;
      out.trace.push_back(sp.value(z));
    }
    if (budget_exhausted) break;

    const double violation = al.violation(z);
    if (inner_converged && violation < cfg.constraint_tolerance) {
      out.converged = true;
      out.termination = "kkt";
      break;
    }
    al.update_multipliers(z);
    if (violation > 0.25 * previous_violation) al.increase_penalty();
    previous_violation = violation;
  }
  if (out.termination.empty()) out.termination = "outer_iterations";
  out.z = std::move(z);
  return out;
}

void validate_problem(const PlanningProblem& problem, const Bounds& bounds,
                      const std::vector<std::vector<std::size_t>>& groups) {
  const auto& model = *problem.model;
  check_target(model, problem.target);
  double sum = 0.0;
  for (double v : problem.target) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("target probabilities must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("target probabilities must sum to 1");

  const auto d = model.dim();
  if (static_cast<std::size_t>(bounds.lower.size()) != d || static_cast<std::size_t>(bounds.upper.size()) != d) {
    throw DimensionMismatch("bounds", d, static_cast<std::size_t>(bounds.lower.size()));
  }
  for (std::size_t i = 0; i < d; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (!(bounds.lower[ii] <= bounds.upper[ii])) {
      throw ValidationError("infeasible bounds on feature " + model.schema()[i].name);
    }
  }
  std::vector<bool> seen(d, false);
  for (const auto& g : groups) {
    if (g.size() < 2) throw ValidationError("unit-norm groups need at least two features");
    for (auto i : g) {
      if (i >= d) throw ValidationError("unit-norm group index out of range");
      if (seen[i]) throw ValidationError("unit-norm groups must be disjoint");
      seen[i] = true;
    }
  }
}

std::vector<LabeledSample> generated_candidates(const MultiTaskModel& model, const PlanConfig& cfg) {
  std::vector<LabeledSample> out;
  for (std::size_t k = 0; k < model.class_count(); ++k) {
    const auto& c = model.classes()[k];
    out.push_back({c.gaussian.mean(), c.tasks});
    const auto draws = sample(c.gaussian, cfg.generated_candidates_per_class,
                              cfg.seed * 1'000'003ULL + k);
    for (const auto& x : draws) out.push_back({x, c.tasks});
  }
  return out;
}

}  // namespace

PlanResult plan(const PlanningProblem& problem, const PlanConfig& config) {
  if (!problem.model) throw ValidationError("planning problem has no model");
  const auto& model = *problem.model;
  const Bounds bounds = problem.bounds ? *problem.bounds : default_bounds(model);
  const auto groups = problem.unit_norm_groups ? *problem.unit_norm_groups : model.schema().unit_norm_groups();
  validate_problem(problem, bounds, groups);

  const ScaledProblem sp(model, problem.target, bounds, groups);

  std::vector<LabeledSample> candidates =
      problem.candidates.empty() ? generated_candidates(model, config) : problem.candidates;
  for (auto& c : candidates) {
    if (static_cast<std::size_t>(c.x.size()) != model.dim()) {
      throw DimensionMismatch("candidate pose", model.dim(), static_cast<std::size_t>(c.x.size()));
    }
    const auto projected = sp.project(sp.to_z(c.x));
    if (!projected) throw ValidationError("bounds leave no room for the unit-norm constraints");
    c.x = sp.to_x(*projected);
  }
  const auto starts = rank_initial_indices(model, problem.target, candidates, std::max<std::size_t>(config.starts, 1));

  PlanResult result;
  result.solver = config.strategy;
  result.initial_x = candidates[starts.front()].x;
  result.initial_residual = objective(model, problem.target, result.initial_x);

  const Deadline deadline(config.time_limit);
  std::optional<SolveOutcome> best;
  Vector x;
  double residual = std::numeric_limits<double>::infinity();
  bool feasible = false;
  for (const std::size_t start : starts) {
    const Vector z0 = sp.to_z(candidates[start].x);
    SolveOutcome outcome = config.strategy == SolverStrategy::ProjectedGradient
                               ? projected_gradient(sp, z0, config, deadline)
                               : augmented_lagrangian(sp, z0, config, deadline);
    Vector candidate_x = sp.to_x(outcome.z);
    if (const auto polished = sp.project(outcome.z)) candidate_x = sp.to_x(*polished);
    const double candidate_residual = objective(model, problem.target, candidate_x);
    const bool candidate_feasible = sp.feasible_x(candidate_x, bounds);
    const bool better = !best || (candidate_feasible && !feasible) ||
                        (candidate_feasible == feasible && candidate_residual < residual);
    if (better) {
      best = std::move(outcome);
      x = std::move(candidate_x);
      residual = candidate_residual;
      feasible = candidate_feasible;
    }
    if (deadline.expired()) break;
  }
  SolveOutcome outcome = std::move(*best);

  if (!feasible || residual > result.initial_residual) {
    // The start pose is feasible and no worse; fall back to it.
    x = result.initial_x;
    residual = result.initial_residual;
    feasible = sp.feasible_x(x, bounds);
    outcome.converged = false;
    outcome.termination += feasible ? "+fallback_to_initial" : "+infeasible";
  }

  result.x = std::move(x);
  result.posterior = posterior_vector(model, result.x);
  result.residual = residual;
  result.iterations = outcome.iterations;
  result.trace = std::move(outcome.trace);
  result.converged = outcome.converged;
  result.feasible = feasible;
  result.termination = std::move(outcome.termination);
  return result;
}

}  // namespace intentgrasp
