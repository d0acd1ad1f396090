#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wgstark/discretize.hpp"

namespace wgstark {

struct Eigenpair {
  Complex value;
  Eigen::VectorXcd vector;
  /// ||(M - value) v|| / ||v||, recomputed from one matrix-vector product.
  double residual = 0.0;
};

struct SolverOptions {
  enum class Method { Auto, ShiftInvert, Dense };
  Method method = Method::Auto;
  int k = 6;
  double tol = 1e-12;
  int max_iter = 1000;
  /// Arnoldi basis size; 0 picks max(2k + 1, k + 20).
  int ncv = 0;
  std::uint64_t seed = 20240601;
  /// Auto falls back to a dense solve when Arnoldi stagnates and n is at most this.
  std::size_t dense_limit = 2500;
};

double residual_norm(const Eigen::SparseMatrix<Complex>& m, Complex value, const Eigen::VectorXcd& v);

/// The k eigenpairs nearest `target`, sorted by distance.  Shift-invert Arnoldi
/// on a sparse LU factorization of M - target; if the factorization is
/// singular the shift is perturbed and retried.
std::vector<Eigenpair> complex_eigs_near(const Eigen::SparseMatrix<Complex>& m, Complex target,
                                         const SolverOptions& options = {});
std::vector<Eigenpair> complex_eigs_near(const OperatorMatrix& op, Complex target, const SolverOptions& options = {});

/// All eigenvalues of a dense copy (LAPACK zgeev).  Intended for n <= 2500.
std::vector<Complex> dense_eigenvalues(const Eigen::SparseMatrix<Complex>& m);
/// Dense solve with eigenvectors, the k nearest to target.
std::vector<Eigenpair> dense_eigs_near(const Eigen::SparseMatrix<Complex>& m, Complex target, int k);

/// Number of eigenvalues of a real symmetric matrix strictly below `cap`,
/// from the inertia of an LDL^T factorization of M - cap.
int count_below(const Eigen::SparseMatrix<double>& m, double cap);

struct BoundStates {
  std::vector<Eigenpair> states;
  /// Sizes of the groups of eigenvalues closer than 1e-9; n is their sum.
  std::vector<int> multiplicity;
  int count() const noexcept { return static_cast<int>(states.size()); }
};

/// Up to k eigenpairs below lambda0 - gap_tol of a Hermitian operator.
/// Eigenvalues are isolated by inertia bisection, then refined by
/// shift-invert.  Throws ConvergenceFailure if a residual exceeds 1e-8.
BoundStates bound_states(const OperatorMatrix& op, double lambda0, int k, double gap_tol = 1e-6);

struct ResonanceEstimate {
  Complex value;
  double residual = 0.0;
  double beta = 0.0;
  Grid grid;
  /// 0: resonance, 1: rotated continuum.
  int cluster = 1;
};

struct SelectionRule {
  double e0 = 0.0;      // bound-state energy (absolute)
  double beta = 0.0;
  double window = 0.0;  // deltaE
  int expected = 1;
  double tol_im = 1e-10;
  double residual_tol = 1e-8;
};

struct Selection {
  std::vector<ResonanceEstimate> resonances;  // sorted by |Z - E0|
  std::vector<ResonanceEstimate> continuum;
  int expected = 0;
  bool count_matches() const noexcept { return static_cast<int>(resonances.size()) == expected; }
};

Selection select_resonances(const std::vector<Eigenpair>& candidates, const SelectionRule& rule,
                            const Grid& grid = {});

struct PlateauReport {
  enum class Verdict { Stable, Unstable, InsufficientData };

  std::vector<double> betas;
  std::vector<std::optional<ResonanceEstimate>> values;
  std::vector<std::string> failures;  // per beta, empty on success
  /// Drift over the plateau interval when stable, otherwise the smallest
  /// drift over any three consecutive values.
  double max_drift = 0.0;
  /// Largest pairwise drift among all successful values.
  double overall_drift = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> interval;  // inclusive indices
  Verdict verdict = Verdict::InsufficientData;
};

std::string_view to_string(PlateauReport::Verdict verdict);

/// Verdict from a Z(beta) table: the longest run of >= 3 consecutive
/// successful values with pairwise drift <= drift_tol.
PlateauReport plateau_report(std::vector<double> betas, std::vector<std::optional<ResonanceEstimate>> values,
                             std::vector<std::string> failures, double drift_tol);

/// Runs the full pipeline for each beta on one grid and reports the plateau.
PlateauReport theta_plateau(const WaveguideSetup& setup, const DistortionParams& base, const Grid& grid,
                            const std::vector<double>& betas, double e0, double drift_tol,
                            const SolverOptions& options = {});

struct SectorProbe {
  std::vector<Complex> eigenvalues;  // Re inside the window
  double max_imag = 0.0;
  /// Least squares Im = slope (Re - lambda0) + offset over Re >= lambda0.
  double slope = 0.0;
  double offset = 0.0;
};

/// Eigenvalues of an H0,theta matrix with Re in [re_lo, re_hi], collected by
/// shift-invert at real targets across the window.
SectorProbe sector_probe(const OperatorMatrix& op, double lambda0, double re_lo, double re_hi,
                         const SolverOptions& options = {});

/// Largest singular value of V_theta (H~0,theta(F) - z)^{-1} by power
/// iteration on K* K.  `table` must carry distortion parameters.
double birman_schwinger_norm(const CoefficientTable& table, Complex z, double rel_tol = 1e-6, int max_iter = 2000);
double birman_schwinger_norm(const WaveguideSetup& setup, const DistortionParams& params, const Grid& grid, Complex z,
                             double rel_tol = 1e-6);

}  // namespace wgstark
