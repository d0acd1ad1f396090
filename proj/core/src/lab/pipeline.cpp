#include "wgstark/lab/pipeline.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/Dense>

#include "wgstark/errors.hpp"

namespace wgstark::lab {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ReferenceSolve reference_bound_state(const GeometrySetup& geometry, const Grid& grid, int k) {
  const auto t0 = std::chrono::steady_clock::now();
  const WaveguideSetup setup{geometry, FieldConfig{0.0, 0.0}};
  const OperatorMatrix op = assemble(OperatorKind::Waveguide, setup, std::nullopt, grid);
  ReferenceSolve ref;
  ref.grid = grid;
  ref.lambda0 = discrete_threshold(grid);
  const BoundStates bs = bound_states(op, ref.lambda0, k);
  if (bs.count() == 0) throw ConvergenceFailure("no eigenvalue below the threshold on the reference grid");
  for (const auto& st : bs.states) {
    ref.energies.push_back(st.value.real());
    ref.residual = std::max(ref.residual, st.residual);
  }
  ref.seconds = seconds_since(t0);
  return ref;
}

DistortionParams resolve_distortion(const RunConfig& config, const ReferenceSolve& ref, double beta) {
  DistortionParams p;
  p.reference_energy = config.distortion.E ? *config.distortion.E : ref.e0() - ref.lambda0;
  p.window = config.distortion.deltaE ? *config.distortion.deltaE
                                      : std::min(0.5 * std::abs(p.reference_energy), 0.25 * ref.gap());
  p.beta = beta;
  p.sharpness = config.distortion.sharpness;
  p.validate();
  return p;
}

Grid resolve_grid(const RunConfig& config, const DistortionParams& params, const FieldConfig& field, double alpha0) {
  double L = 0.0;
  if (config.grid.L) {
    L = *config.grid.L;
  } else {
    const double margin = config.grid.margin ? *config.grid.margin
                                             : std::max(default_margin(params, field, alpha0),
                                                        damping_length(params, field, alpha0, config.grid.damping));
    L = auto_truncation(params, field, alpha0, margin);
  }
  if (config.grid.Ns) return Grid{L, *config.grid.Ns, config.grid.Nu, config.geometry.d};
  const double hs = config.grid.hs;
  const int ns = std::max(3, static_cast<int>(std::ceil(2.0 * L / hs - 1e-9)) - 1);
  return Grid{0.5 * (ns + 1) * hs, ns, config.grid.Nu, config.geometry.d};
}

Grid reference_grid(const RunConfig& config, double hs, int nu) {
  const int ns = std::max(3, static_cast<int>(std::lround(2.0 * config.grid.reference_L / hs)) - 1);
  return Grid{0.5 * (ns + 1) * hs, ns, nu, config.geometry.d};
}

Grid doubled(const Grid& grid) { return Grid{grid.half_length, 2 * grid.ns + 1, 2 * grid.nu + 1, grid.width}; }

ResonanceRun solve_resonance(const WaveguideSetup& setup, const DistortionParams& params, const Grid& grid, double e0,
                             Complex target, const SolverOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  ResonanceRun run;
  run.params = params;
  run.grid = grid;
  run.e0 = e0;
  run.record.F = setup.field.strength;
  run.record.beta = params.beta;
  run.record.L = grid.half_length;
  run.record.Ns = grid.ns;
  run.record.Nu = grid.nu;
  run.record.re = std::nan("");
  run.record.im = std::nan("");
  run.record.residual = std::nan("");
  try {
    const OperatorMatrix op = assemble(OperatorKind::DistortedStark, setup, params, grid);
    run.candidates = complex_eigs_near(op, target, options);
    SelectionRule rule;
    rule.e0 = e0;
    rule.beta = params.beta;
    rule.window = params.window;
    rule.residual_tol = std::max(1e-8, 10.0 * options.tol);
    run.selection = select_resonances(run.candidates, rule, grid);
    if (run.selection.resonances.empty()) {
      run.record.failure = "no candidate passed the selection rule";
    } else {
      const auto& z = run.selection.resonances.front();
      run.record.re = z.value.real();
      run.record.im = z.value.imag();
      run.record.residual = z.residual;
      run.record.ok = true;
      if (!run.selection.count_matches()) {
        run.record.failure = "selected " + std::to_string(run.selection.resonances.size()) + " candidates, expected " +
                             std::to_string(run.selection.expected);
      }
    }
  } catch (const std::exception& e) {
    run.record.failure = e.what();
  }
  run.record.wall_time = seconds_since(t0);
  return run;
}

WidthFit fit_width(const std::vector<SweepRecord>& records) {
  std::vector<double> x;
  std::vector<double> y;
  WidthFit fit;
  for (const auto& r : records) {
    if (!r.ok || !(r.im < 0.0) || !(r.F > 0.0)) continue;
    x.push_back(1.0 / r.F);
    y.push_back(std::log(-r.im));
    fit.f_min = x.size() == 1 ? r.F : std::min(fit.f_min, r.F);
    fit.f_max = std::max(fit.f_max, r.F);
  }
  if (x.size() < 4) {
    throw InvalidArgument("width fit needs at least 4 records with Im Z < 0, got " + std::to_string(x.size()));
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[static_cast<std::size_t>(i)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = (a * coef - b).squaredNorm();
  fit.c1 = std::exp(coef(0));
  fit.c2 = -coef(1);
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.used = x.size();
  return fit;
}

}  // namespace wgstark::lab
