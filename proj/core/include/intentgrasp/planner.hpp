#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "intentgrasp/task_model.hpp"

namespace intentgrasp {

struct Bounds {
  Vector lower;
  Vector upper;
};

enum class SolverStrategy {
  /// Projected gradient descent, Armijo backtracking, unit-norm groups renormalized every step.
  ProjectedGradient,
  /// Powell-Hestenes-Rockafellar augmented Lagrangian with a BFGS inner solver.
  AugmentedLagrangian,
};

std::string to_string(SolverStrategy s);
SolverStrategy parse_solver(const std::string& name);

/// Curvature information behind each solver's search direction.
enum class CurvatureModel {
  /// Damped Gauss-Newton model of the least-squares objective. Strategy (a)
  /// applies it on the tangent space of the unit-norm groups; strategy (b)
  /// adds the exact Hessian of the penalty terms.
  GaussNewton,
  /// Strategy (a): steepest descent with Barzilai-Borwein trial steps.
  /// Strategy (b): BFGS from the identity.
  FirstOrder,
};

struct PlanConfig {
  SolverStrategy strategy = SolverStrategy::ProjectedGradient;
  CurvatureModel curvature = CurvatureModel::GaussNewton;
  double gradient_tolerance = 1e-8;
  double objective_tolerance = 1e-12;
  std::size_t max_iterations = 10'000;
  /// Seeds the draws used as initial-pose candidates when the problem has none.
  std::uint64_t seed = 0;
  std::size_t generated_candidates_per_class = 16;
  /// Number of best-ranked candidates the solver is started from; the lowest
  /// final residual wins.
  std::size_t starts = 4;
  /// Wall-clock budget; on expiry the best feasible iterate so far is returned, flagged.
  std::optional<std::chrono::milliseconds> time_limit;

  double armijo_c = 1e-4;
  double step_shrink = 0.5;
  double initial_step = 1.0;
  /// Longest trial move, in units of the per-feature class standard deviation.
  double max_step = 1.0;

  /// Augmented-Lagrangian feasibility target, in constraint units.
  double constraint_tolerance = 1e-10;
};

struct PlanningProblem {
  std::shared_ptr<const MultiTaskModel> model;
  std::vector<double> target;
  /// Defaults to default_bounds(*model).
  std::optional<Bounds> bounds;
  /// Defaults to the schema's unit-norm groups.
  std::optional<std::vector<std::vector<std::size_t>>> unit_norm_groups;
  /// Training poses to initialize from; seeded class draws are used when empty.
  std::vector<LabeledSample> candidates;
};

struct PlanResult {
  Vector x;
  Vector posterior;
  double residual = 0.0;
  Vector initial_x;
  double initial_residual = 0.0;
  std::size_t iterations = 0;
  SolverStrategy solver = SolverStrategy::ProjectedGradient;
  std::vector<double> trace;
  bool converged = false;
  bool feasible = false;
  /// gradient, objective_change, stationary_start, line_search, max_iterations, time_limit, ...
  std::string termination;
};

/// ½ Σ_k (v_k − P_k(x))²
double objective(const MultiTaskModel& model, const std::vector<double>& target, const Vector& x);

/// K×d matrix of ∂P_k/∂x_i; rows sum to zero column-wise since Σ_k P_k ≡ 1.
Matrix posterior_jacobian(const MultiTaskModel& model, const Vector& x);

/// True gradient of objective(): −Jᵀ(v − P).
Vector objective_gradient(const MultiTaskModel& model, const std::vector<double>& target,
                          const Vector& x);

/// Per feature [min − ½·range, max + ½·range] of the observed training range;
/// features without a recorded range fall back to the class means ± 4σ.
Bounds default_bounds(const MultiTaskModel& model);

/// Index of the candidate to start from: among candidates whose zone label
/// contains the most probable target zone, the objective minimizer (lowest
/// index on ties); all candidates when that restriction is empty.
std::size_t select_initial_index(const MultiTaskModel& model, const std::vector<double>& target,
                                 const std::vector<LabeledSample>& candidates);

/// The `count` best candidates in the order select_initial_index ranks them:
/// the restricted set by objective, then the remaining candidates by objective.
std::vector<std::size_t> rank_initial_indices(const MultiTaskModel& model, const std::vector<double>& target,
                                              const std::vector<LabeledSample>& candidates, std::size_t count);

Vector select_initial_pose(const MultiTaskModel& model, const std::vector<double>& target,
                           const std::vector<LabeledSample>& candidates);

/// Minimizes the probability-matching objective subject to box bounds and
/// unit-norm groups. Non-convergence is reported in the result, not thrown.
PlanResult plan(const PlanningProblem& problem, const PlanConfig& config = {});

}  // namespace intentgrasp
