#include "intentgrasp/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "intentgrasp/errors.hpp"

namespace intentgrasp {

double kl_gauss(const Gaussian& p, const Gaussian& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("KL divergence operands", p.dim(), q.dim());
  const auto lq = q.factor().triangularView<Eigen::Lower>();
  // tr(Σ_Q⁻¹Σ_P) = ‖L_Q⁻¹ L_P‖²_F
  const Matrix m = lq.solve(p.factor());
  const double trace_term = m.squaredNorm();
  const double maha = q.mahalanobis_squared(p.mean());
  const double d = static_cast<double>(p.dim());
  const double kl = 0.5 * (trace_term + maha - d + q.log_det() - p.log_det());
  // Rounding can leave a tiny negative for (numerically) identical operands.
  return std::max(kl, 0.0);
}

double pinsker_bound(double kl) {
  if (!(kl >= 0.0)) throw ValidationError("KL divergence must be nonnegative");
  return std::sqrt(kl / 2.0);
}

DivergenceReport divergence_matrices(const std::vector<std::string>& tasks,
                                     std::span<const Gaussian> populations) {
  if (tasks.size() != populations.size()) {
    throw DimensionMismatch("task populations", tasks.size(), populations.size());
  }
  const auto m = static_cast<Eigen::Index>(tasks.size());
  DivergenceReport r;
  r.tasks = tasks;
  r.nonsymmetric = Matrix::Zero(m, m);
  r.pinsker = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      const double kl = kl_gauss(populations[static_cast<std::size_t>(i)], populations[static_cast<std::size_t>(j)]);
      r.nonsymmetric(i, j) = kl;
      r.pinsker(i, j) = pinsker_bound(kl);
    }
  }
  r.symmetric = r.nonsymmetric + r.nonsymmetric.transpose();
  r.eigenvalues = divergence_spectrum(r);
  return r;
}

DivergenceReport divergence_matrices(const MultiTaskModel& model,
                                     std::span<const LabeledSample> samples, const MleOptions& mle) {
  const auto& layout = model.layout();
  std::vector<Gaussian> populations;
  std::vector<std::string> refit;
  for (std::size_t t = 0; t < layout.task_count(); ++t) {
    const TaskSet single(1u << t);
    const std::size_t k = layout.index_of(single);
    if (k < layout.zone_count()) {
      populations.push_back(model.classes()[k].gaussian);
      continue;
    }
    if (samples.empty()) throw MissingTaskPopulation(layout.tasks()[t]);
    std::vector<Vector> members;
    for (const auto& s : samples) {
      if (s.zone.contains(t)) members.push_back(s.x);
    }
    populations.push_back(fit_mle(members, mle, layout.name_of(single)));
    refit.push_back(layout.tasks()[t]);
  }
  auto report = divergence_matrices(layout.tasks(), populations);
  report.refit_tasks = std::move(refit);
  return report;
}

std::vector<double> divergence_spectrum(const DivergenceReport& report) {
  if (report.symmetric.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(report.symmetric, Eigen::EigenvaluesOnly);
  std::vector<double> values(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

std::vector<double> nonsymmetric_singular_values(const DivergenceReport& report) {
  if (report.nonsymmetric.size() == 0) return {};
  Eigen::JacobiSVD<Matrix> svd(report.nonsymmetric);
  const Vector s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

}  // namespace intentgrasp
