#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace intentgrasp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Multivariate normal N(mean, covariance) with a cached Cholesky factor.
///
/// Construction validates symmetry (1e-10 relative) and positive
/// definiteness; the object is immutable afterwards, so a single instance can
/// be shared across threads. Density, gradient and solves all go through the
/// triangular factor; the covariance is never explicitly inverted.
class Gaussian {
 public:
  Gaussian(Vector mean, Matrix covariance);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& covariance() const noexcept { return covariance_; }
  /// Lower-triangular L with L Lᵀ = covariance.
  const Matrix& factor() const noexcept { return factor_; }
  double log_det() const noexcept { return log_det_; }

  /// Σ⁻¹ b via two triangular solves.
  Vector solve(const Vector& b) const;
  /// (x-μ)ᵀ Σ⁻¹ (x-μ)
  double mahalanobis_squared(const Vector& x) const;

  double log_pdf(const Vector& x) const;
  double pdf(const Vector& x) const;
  /// ∇ₓ log N(x) = -Σ⁻¹(x-μ)
  Vector log_pdf_gradient(const Vector& x) const;
  /// ∇ₓ N(x) = -N(x) Σ⁻¹(x-μ)
  Vector pdf_gradient(const Vector& x) const;

 private:
  void check_dim(const Vector& x) const;

  Vector mean_;
  Matrix covariance_;
  Matrix factor_;
  double log_det_ = 0.0;
};

struct MleOptions {
  /// Additive ridge εI. When unset, ε = relative_regularization · trace(S)/d
  /// where S is the unregularized sample covariance.
  std::optional<double> regularization;
  double relative_regularization = 1e-6;
  /// Keep only the diagonal of the sample covariance.
  bool diagonal = false;
};

/// Maximum-likelihood Gaussian (denominator n) plus ridge.
///
/// With fully labeled training data the EM procedure has no latent
/// assignments to estimate, so its fixed point is this closed form.
/// Requires n ≥ d+1 unless an explicit positive regularization is given, in
/// which case n ≥ 1 suffices. `label` names the data set in error messages.
Gaussian fit_mle(std::span<const Vector> samples, const MleOptions& options = {},
                 const std::string& label = "samples");

/// n draws μ + L z with z ~ N(0, I); deterministic for a given seed.
std::vector<Vector> sample(const Gaussian& g, std::size_t n, std::uint64_t seed);

/// Free-function aliases matching the textbook names.
inline double mvn_pdf(const Vector& x, const Gaussian& g) { return g.pdf(x); }
inline double mvn_logpdf(const Vector& x, const Gaussian& g) { return g.log_pdf(x); }
inline Vector mvn_pdf_grad(const Vector& x, const Gaussian& g) { return g.pdf_gradient(x); }

}  // namespace intentgrasp
