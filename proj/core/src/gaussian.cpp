#include "intentgrasp/gaussian.hpp"

#include <cmath>
#include <random>

#include "intentgrasp/errors.hpp"

namespace intentgrasp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2π)

}  // namespace

Gaussian::Gaussian(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  const auto d = static_cast<std::size_t>(mean_.size());
  if (d == 0) throw ValidationError("Gaussian dimension must be positive");
  if (static_cast<std::size_t>(covariance_.rows()) != d ||
      static_cast<std::size_t>(covariance_.cols()) != d) {
    throw DimensionMismatch("covariance", d, static_cast<std::size_t>(covariance_.rows()));
  }
  if (!mean_.allFinite()) throw ValidationError("Gaussian mean has non-finite entries");
  if (!covariance_.allFinite()) throw NotPositiveDefinite("covariance has non-finite entries");

  const double scale = covariance_.cwiseAbs().maxCoeff();
  const double asym = (covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) throw ValidationError("covariance is not symmetric");
  covariance_ = 0.5 * (covariance_ + covariance_.transpose());

  Eigen::LLT<Matrix> llt(covariance_);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("covariance is not positive definite");
  factor_ = llt.matrixL();
  const Vector diag = factor_.diagonal();
  if ((diag.array() <= 0.0).any()) throw NotPositiveDefinite("covariance is not positive definite");
  log_det_ = 2.0 * diag.array().log().sum();
  if (!std::isfinite(log_det_)) throw NotPositiveDefinite("covariance log-determinant is not finite");
}

void Gaussian::check_dim(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw DimensionMismatch("feature vector", dim(), static_cast<std::size_t>(x.size()));
  }
}

Vector Gaussian::solve(const Vector& b) const {
  check_dim(b);
  const auto lower = factor_.triangularView<Eigen::Lower>();
  Vector y = lower.solve(b);
  return lower.transpose().solve(y);
}

double Gaussian::mahalanobis_squared(const Vector& x) const {
  check_dim(x);
  const Vector z = factor_.triangularView<Eigen::Lower>().solve(x - mean_);
  return z.squaredNorm();
}

double Gaussian::log_pdf(const Vector& x) const {
  const double d = static_cast<double>(dim());
  return -0.5 * (mahalanobis_squared(x) + log_det_ + d * kLog2Pi);
}

double Gaussian::pdf(const Vector& x) const { return std::exp(log_pdf(x)); }

Vector Gaussian::log_pdf_gradient(const Vector& x) const {
  check_dim(x);
  return -solve(x - mean_);
}

Vector Gaussian::pdf_gradient(const Vector& x) const { return pdf(x) * log_pdf_gradient(x); }

Gaussian fit_mle(std::span<const Vector> samples, const MleOptions& options,
                 const std::string& label) {
  if (samples.empty()) throw InsufficientSamples(label, 0, 1);
  const auto d = static_cast<std::size_t>(samples.front().size());
  if (d == 0) throw ValidationError("samples have zero dimension");
  for (const auto& s : samples) {
    if (static_cast<std::size_t>(s.size()) != d) {
      throw DimensionMismatch("sample", d, static_cast<std::size_t>(s.size()));
    }
    if (!s.allFinite()) throw ValidationError("sample has non-finite entries");
  }
  if (options.regularization && *options.regularization < 0.0) {
    throw ValidationError("regularization must be nonnegative");
  }
  const bool explicit_ridge = options.regularization && *options.regularization > 0.0;
  const std::size_t need = explicit_ridge ? 1 : d + 1;
  if (samples.size() < need) throw InsufficientSamples(label, samples.size(), need);

  const double n = static_cast<double>(samples.size());
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(d));
  for (const auto& s : samples) mean += s;
  mean /= n;

  Matrix cov = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (const auto& s : samples) {
    const Vector c = s - mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= n;
  if (options.diagonal) cov = Matrix(cov.diagonal().asDiagonal());

  const double ridge = options.regularization
                           ? *options.regularization
                           : options.relative_regularization * cov.trace() / static_cast<double>(d);
  cov.diagonal().array() += ridge;

  try {
    return Gaussian(std::move(mean), std::move(cov));
  } catch (const NotPositiveDefinite&) {
    throw NotPositiveDefinite("degenerate covariance for " + label + " even after regularization");
  }
}

std::vector<Vector> sample(const Gaussian& g, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(n);
  const auto d = static_cast<Eigen::Index>(g.dim());
  for (std::size_t i = 0; i < n; ++i) {
    Vector z(d);
    for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
    out.emplace_back(g.mean() + g.factor().triangularView<Eigen::Lower>() * z);
  }
  return out;
}

}  // namespace intentgrasp
