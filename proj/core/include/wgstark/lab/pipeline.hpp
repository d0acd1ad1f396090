#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wgstark/lab/config.hpp"

namespace wgstark::lab {

/// F = 0 bound-state solve that fixes E0 and the threshold of one (hs, Nu) pair.
struct ReferenceSolve {
  Grid grid;
  double lambda0 = 0.0;
  std::vector<double> energies;  // below lambda0, ascending
  double residual = 0.0;
  double seconds = 0.0;

  double e0() const { return energies.front(); }
  /// Distance from E0 to the next eigenvalue below lambda0, or to lambda0.
  double gap() const { return (energies.size() > 1 ? energies[1] : lambda0) - energies.front(); }
};

/// Throws ConvergenceFailure when the guide has no bound state.
ReferenceSolve reference_bound_state(const GeometrySetup& geometry, const Grid& grid, int k = 2);

/// E = E0 - lambda0 and deltaE = min(|E|/2, gap/4) unless fixed by the config.
DistortionParams resolve_distortion(const RunConfig& config, const ReferenceSolve& ref, double beta);

/// L and Ns for a distorted solve.  Auto L is the larger plateau onset plus
/// max(default margin, damping length).  With auto Ns the spacing is exactly
/// grid.hs and L is rounded up to a whole number of cells.
Grid resolve_grid(const RunConfig& config, const DistortionParams& params, const FieldConfig& field, double alpha0);

/// Grid of half-length about grid.reference_L with spacing exactly hs.
Grid reference_grid(const RunConfig& config, double hs, int nu);

/// Same L with hs halved and Nu -> 2 Nu + 1, so both spacings halve exactly.
Grid doubled(const Grid& grid);

/// One row of a sweep table.
struct SweepRecord {
  double F = 0.0;
  double beta = 0.0;
  double re = 0.0;
  double im = 0.0;
  double residual = 0.0;
  double L = 0.0;
  int Ns = 0;
  int Nu = 0;
  double wall_time = 0.0;
  bool ok = false;
  std::string failure;
};

struct ResonanceRun {
  SweepRecord record;
  Selection selection;
  std::vector<Eigenpair> candidates;
  DistortionParams params;
  Grid grid;
  double e0 = 0.0;
};

/// Assembles H_theta(F), computes the k eigenpairs nearest `target` and
/// applies the selection rule around e0.  Solver errors are reported in
/// record.failure rather than thrown.
ResonanceRun solve_resonance(const WaveguideSetup& setup, const DistortionParams& params, const Grid& grid, double e0,
                             Complex target, const SolverOptions& options);

struct WidthFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double r_squared = 0.0;
  double f_min = 0.0;
  double f_max = 0.0;
  std::size_t used = 0;
  bool confirms_exponential_law() const noexcept { return c2 > 0.0; }
};

/// Least squares ln|Im Z| = ln c1 - c2/F over successful records with
/// Im Z < 0.  Throws InvalidArgument with fewer than four such records.
WidthFit fit_width(const std::vector<SweepRecord>& records);

/// Runs jobs on up to `workers` threads; results keep the input order.
template <class Result, class Job>
std::vector<Result> dispatch(const std::vector<Job>& jobs, int workers);

}  // namespace wgstark::lab

#include "wgstark/lab/detail/dispatch.hpp"
