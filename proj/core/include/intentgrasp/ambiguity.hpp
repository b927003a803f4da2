#pragma once

#include <span>
#include <string>
#include <vector>

#include "intentgrasp/task_model.hpp"

namespace intentgrasp {

/// Pairwise divergences between principle-task populations.
///
/// Row i treats task i as the true population P, column j treats task j as
/// the inference population Q.
struct DivergenceReport {
  std::vector<std::string> tasks;
  Matrix nonsymmetric;
  Matrix symmetric;
  /// √(KL/2) of each nonsymmetric entry.
  Matrix pinsker;
  /// Eigenvalues of the symmetric matrix, descending.
  std::vector<double> eigenvalues;
  /// Tasks whose population had to be refit from training samples because
  /// the layout has no singleton class for them.
  std::vector<std::string> refit_tasks;
};

/// KL(P‖Q) = ½[tr(Σ_Q⁻¹Σ_P) + (μ_Q−μ_P)ᵀΣ_Q⁻¹(μ_Q−μ_P) − d + ln(|Σ_Q|/|Σ_P|)].
double kl_gauss(const Gaussian& p, const Gaussian& q);

/// δ = √(kl/2)
double pinsker_bound(double kl);

/// Population of task t: the singleton class {t} when the layout has one.
/// Otherwise, when samples are given, a Gaussian fitted to every sample whose
/// zone contains t (the inclusive set {t} would receive); without samples a
/// MissingTaskPopulation is thrown.
DivergenceReport divergence_matrices(const MultiTaskModel& model,
                                     std::span<const LabeledSample> samples = {},
                                     const MleOptions& mle = {});

/// Assembles a report from explicit per-task populations.
DivergenceReport divergence_matrices(const std::vector<std::string>& tasks,
                                     std::span<const Gaussian> populations);

/// Eigenvalues of the symmetric matrix, descending.
std::vector<double> divergence_spectrum(const DivergenceReport& report);

/// Singular values of the nonsymmetric matrix, descending.
std::vector<double> nonsymmetric_singular_values(const DivergenceReport& report);

}  // namespace intentgrasp
