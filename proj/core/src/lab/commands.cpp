#include "wgstark/lab/commands.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "wgstark/errors.hpp"
#include "wgstark/lab/output.hpp"
#include "wgstark/lab/pipeline.hpp"

#ifndef WGSTARK_VERSION
#define WGSTARK_VERSION "unknown"
#endif

namespace wgstark::lab {

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Check: return "check";
    case Command::Modes: return "modes";
    case Command::Bound: return "bound";
    case Command::Resonance: return "resonance";
    case Command::SweepTheta: return "sweep_theta";
    case Command::SweepField: return "sweep_field";
    case Command::Confining: return "confining";
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::Check, Command::Modes, Command::Bound, Command::Resonance, Command::SweepTheta,
                    Command::SweepField, Command::Confining}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::vector<double> default_field_ladder() { return {0.004, 0.003, 0.00225, 0.0017, 0.00125, 0.00095, 0.0007}; }

std::vector<double> default_beta_list() { return {0.005, 0.006, 0.007, 0.008, 0.009}; }

std::filesystem::path output_directory(const RunConfig& config) {
  const std::filesystem::path dir(config.output.dir);
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv("WGSTARK_OUTPUT_ROOT"); root && *root) return std::filesystem::path(root) / dir;
  return dir;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

YAML::Node grid_node(const Grid& g) {
  YAML::Node n;
  n["L"] = g.half_length;
  n["Ns"] = g.ns;
  n["Nu"] = g.nu;
  n["hs"] = g.hs();
  n["hu"] = g.hu();
  return n;
}

YAML::Node params_node(const DistortionParams& p) {
  YAML::Node n;
  n["E"] = p.reference_energy;
  n["deltaE"] = p.window;
  n["beta"] = p.beta;
  n["sharpness"] = p.sharpness;
  return n;
}

YAML::Node reference_node(const ReferenceSolve& ref) {
  YAML::Node n;
  n["grid"] = grid_node(ref.grid);
  n["lambda0"] = ref.lambda0;
  n["E0"] = ref.e0();
  for (double e : ref.energies) n["energies"].push_back(e);
  n["residual"] = ref.residual;
  return n;
}

const std::vector<std::string> kSweepHeader = {"F", "beta", "re_Z", "im_Z", "residual", "L", "Ns", "Nu"};

void add_record(CsvTable& t, const SweepRecord& r) {
  t.row().add(r.F).add(r.beta).add(r.re).add(r.im).add(r.residual).add(r.L).add(r.Ns).add(r.Nu);
}

YAML::Node record_node(const SweepRecord& r) {
  YAML::Node n;
  n["F"] = r.F;
  n["beta"] = r.beta;
  n["ok"] = r.ok;
  n["wall_time"] = r.wall_time;
  if (!r.failure.empty()) n["note"] = r.failure;
  return n;
}

class Run {
 public:
  Run(Command command, const RunConfig& config, std::filesystem::path dir, std::ostream* log)
      : command_(command), cfg_(config), out_(std::move(dir)), log_(log), t0_(Clock::now()) {}

  const RunConfig& cfg() const { return cfg_; }
  ArtifactWriter& out() { return out_; }
  YAML::Node resolved;
  YAML::Node results;
  std::vector<std::string> warnings;
  int exit_code = kExitOk;
  std::string summary;

  void log(const std::string& line) {
    if (log_) *log_ << line << '\n' << std::flush;
  }
  void warn(const std::string& w) {
    warnings.push_back(w);
    log("warning: " + w);
  }
  void fail_solver(const std::string& why) {
    exit_code = kExitSolver;
    warn(why);
  }

  void write_csv(const std::string& name, const CsvTable& t) {
    if (cfg_.wants("csv")) out_.write(name, t.str());
  }
  void write_svg(const std::string& name, const PlotSpec& p) {
    if (cfg_.wants("svg")) out_.write(name, render_svg(p));
  }

  void write_manifest(const std::string& error_kind, const std::string& error_message) {
    YAML::Node m;
    m["command"] = std::string(to_string(command_));
    m["status"] = error_kind.empty() ? (exit_code == kExitOk ? "ok" : "failed") : "error";
    m["exit_code"] = exit_code;
    if (!error_kind.empty()) {
      m["error"]["kind"] = error_kind;
      m["error"]["message"] = error_message;
    }
    m["versions"]["wgstark"] = WGSTARK_VERSION;
    m["versions"]["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                             std::to_string(EIGEN_MINOR_VERSION);
    m["versions"]["boost"] = std::string(BOOST_LIB_VERSION);
    m["versions"]["compiler"] = std::string(__VERSION__);
    m["config"] = YAML::Load(cfg_.to_yaml());
    if (resolved.size()) m["resolved"] = resolved;
    if (results.size()) m["results"] = results;
    for (const auto& w : warnings) m["warnings"].push_back(w);
    m["timings"]["total_seconds"] = since(t0_);
    for (const auto& [file, sha] : out_.files()) {
      YAML::Node f;
      f["file"] = file;
      f["sha1"] = sha;
      m["outputs"].push_back(f);
    }
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << m;
    std::ofstream(out_.dir() / "manifest.yaml") << e.c_str() << '\n';
  }

 private:
  Command command_;
  const RunConfig& cfg_;
  ArtifactWriter out_;
  std::ostream* log_;
  Clock::time_point t0_;
};

std::string angles(const RunConfig& cfg) {
  const double a0 = total_bend(cfg.geometry_setup());
  std::ostringstream os;
  os.precision(10);
  os << "|eta| = " << std::abs(cfg.field.eta) << ", |eta - alpha0| = " << std::abs(cfg.field.eta - a0)
     << " (alpha0 = " << a0 << ")";
  return os.str();
}

void require_regime(const RunConfig& cfg, Regime wanted, Command command) {
  const Regime r = cfg.setup().regime();
  if (r == wanted) return;
  throw ConfigError("field.eta", std::string(to_string(command)) + " needs the " + std::string(to_string(wanted)) +
                                     " regime but the configuration is " + std::string(to_string(r)) + ": " +
                                     angles(cfg));
}

// Reference solve, resolved distortion and grid for one field and beta.
struct Prepared {
  ReferenceSolve ref;
  DistortionParams params;
  Grid grid;
};

Prepared prepare(const RunConfig& cfg, const ReferenceSolve& ref, const FieldConfig& field, double beta) {
  Prepared p{ref, resolve_distortion(cfg, ref, beta), {}};
  p.grid = resolve_grid(cfg, p.params, field, total_bend(cfg.geometry_setup()));
  if (std::abs(p.grid.hs() - ref.grid.hs()) > 1e-12 * ref.grid.hs() || p.grid.nu != ref.grid.nu) {
    p.ref = reference_bound_state(cfg.geometry_setup(), reference_grid(cfg, p.grid.hs(), p.grid.nu));
  }
  return p;
}

ReferenceSolve initial_reference(Run& run) {
  const auto& cfg = run.cfg();
  const ReferenceSolve ref =
      reference_bound_state(cfg.geometry_setup(), reference_grid(cfg, cfg.grid.hs, cfg.grid.Nu));
  run.log("reference: E0 = " + format_double(ref.e0()) + ", lambda0 = " + format_double(ref.lambda0));
  return ref;
}

void cmd_check(Run& run) {
  const auto& cfg = run.cfg();
  const GeometrySetup geo = cfg.geometry_setup();
  const HypothesisReport rep = check_hypotheses(geo);
  const double a0 = total_bend(geo);
  const Regime regime = cfg.setup().regime();
  CsvTable t({"quantity", "value"});
  t.row().add(std::string("h1")).add(rep.h1_ok ? 1 : 0);
  t.row().add(std::string("h2")).add(rep.h2_ok ? 1 : 0);
  t.row().add(std::string("h3_surrogate")).add(rep.h3_surrogate_ok ? 1 : 0);
  t.row().add(std::string("d_sup_abs_gamma")).add(cfg.geometry.d * rep.sup_abs_gamma);
  t.row().add(std::string("decay_exponent")).add(rep.fitted_decay_exponent);
  t.row().add(std::string("alpha0")).add(a0);
  t.row().add(std::string("abs_eta")).add(std::abs(cfg.field.eta));
  t.row().add(std::string("abs_eta_minus_alpha0")).add(std::abs(cfg.field.eta - a0));
  run.results["regime"] = std::string(to_string(regime));
  for (const auto& [name, value] : rep.violations) run.warn("hypothesis " + name + " violated at " + format_double(value));
  if (regime == Regime::ResonantBothEnds && cfg.field.F > 0.0) {
    const auto consts = reference_constants(geo, cfg.field_config());
    t.row().add(std::string("A_minus")).add(consts.first);
    t.row().add(std::string("A_plus")).add(consts.second);
    const ReferenceSolve ref = initial_reference(run);
    const Prepared p = prepare(cfg, ref, cfg.field_config(), cfg.distortion.beta);
    t.row().add(std::string("lambda0")).add(p.ref.lambda0);
    t.row().add(std::string("E0")).add(p.ref.e0());
    t.row().add(std::string("E")).add(p.params.reference_energy);
    t.row().add(std::string("deltaE")).add(p.params.window);
    t.row().add(std::string("L")).add(p.grid.half_length);
    t.row().add(std::string("Ns")).add(p.grid.ns);
    run.resolved["reference"] = reference_node(p.ref);
    run.resolved["distortion"] = params_node(p.params);
    run.resolved["grid"] = grid_node(p.grid);
  }
  run.write_csv("check.csv", t);
  std::ostringstream os;
  os << "hypotheses " << (rep.all_ok() ? "ok" : "violated") << ", regime " << to_string(regime);
  run.summary = os.str();
}

void cmd_modes(Run& run) {
  const auto& cfg = run.cfg();
  CsvTable t({"k", "discrete", "continuum", "rel_error"});
  PlotSpec plot{"Transverse modes", "k", "relative error", {{"discrete vs (k pi/d)^2", {}, {}, true}}};
  for (const auto& m : transverse_modes(cfg.geometry.d, cfg.grid.Nu)) {
    const double rel = std::abs(m.discrete - m.continuum) / m.continuum;
    t.row().add(m.k).add(m.discrete).add(m.continuum).add(rel);
    plot.series[0].x.push_back(m.k);
    plot.series[0].y.push_back(rel);
  }
  run.write_csv("modes.csv", t);
  run.write_svg("modes.svg", plot);
  const auto first = transverse_modes(cfg.geometry.d, cfg.grid.Nu).front();
  run.results["lambda1"] = first.discrete;
  run.results["lambda1_rel_error"] = std::abs(first.discrete - first.continuum) / first.continuum;
  run.summary = "lambda1 = " + format_double(first.discrete);
}

void cmd_bound(Run& run) {
  const auto& cfg = run.cfg();
  const double L = cfg.grid.L.value_or(20.0);
  const Grid grid = cfg.grid.Ns ? Grid{L, *cfg.grid.Ns, cfg.grid.Nu, cfg.geometry.d}
                                : Grid::with_spacing(L, cfg.grid.hs, cfg.grid.Nu, cfg.geometry.d);
  run.resolved["grid"] = grid_node(grid);
  const WaveguideSetup setup{cfg.geometry_setup(), FieldConfig{0.0, cfg.field.eta}};
  const OperatorMatrix op = assemble(OperatorKind::Waveguide, setup, std::nullopt, grid);
  const double lambda0 = discrete_threshold(grid);
  const BoundStates bs = bound_states(op, lambda0, cfg.solver.k);
  CsvTable t({"index", "energy", "binding", "residual"});
  PlotSpec plot{"Bound states", "Re E", "Im E", {{"eigenvalues", {}, {}, false}, {"threshold", {lambda0}, {0.0}, false}}};
  for (int i = 0; i < bs.count(); ++i) {
    const auto& st = bs.states[static_cast<std::size_t>(i)];
    t.row().add(i).add(st.value.real()).add(lambda0 - st.value.real()).add(st.residual);
    plot.series[0].x.push_back(st.value.real());
    plot.series[0].y.push_back(st.value.imag());
  }
  run.write_csv("bound_states.csv", t);
  run.write_svg("spectrum.svg", plot);
  run.results["lambda0"] = lambda0;
  run.results["count"] = bs.count();
  for (int m : bs.multiplicity) run.results["multiplicity"].push_back(m);
  if (bs.count() == 0) run.warn("no eigenvalue below the threshold");
  run.summary = std::to_string(bs.count()) + " bound state(s) below lambda0 = " + format_double(lambda0) +
                (bs.count() ? ", E0 = " + format_double(bs.states[0].value.real()) : std::string());
}

void cmd_resonance(Run& run) {
  const auto& cfg = run.cfg();
  require_regime(cfg, Regime::ResonantBothEnds, Command::Resonance);
  const Prepared p = prepare(cfg, initial_reference(run), cfg.field_config(), cfg.distortion.beta);
  run.resolved["reference"] = reference_node(p.ref);
  run.resolved["distortion"] = params_node(p.params);
  run.resolved["grid"] = grid_node(p.grid);
  run.resolved["target"] = p.ref.e0();
  run.log("resonance: L = " + format_double(p.grid.half_length) + ", n = " + std::to_string(p.grid.size()));
  const ResonanceRun r =
      solve_resonance(cfg.setup(), p.params, p.grid, p.ref.e0(), Complex(p.ref.e0(), 0.0), cfg.solver_options());
  CsvTable t(kSweepHeader);
  add_record(t, r.record);
  CsvTable c({"re", "im", "residual", "class"});
  PlotSpec plot{"Distorted spectrum near E0", "Re z", "Im z",
                {{"resonance", {}, {}, false}, {"continuum", {}, {}, false}, {"E0", {p.ref.e0()}, {0.0}, false}}};
  for (const auto& z : r.selection.resonances) {
    c.row().add(z.value.real()).add(z.value.imag()).add(z.residual).add(std::string("resonance"));
    plot.series[0].x.push_back(z.value.real());
    plot.series[0].y.push_back(z.value.imag());
  }
  for (const auto& z : r.selection.continuum) {
    c.row().add(z.value.real()).add(z.value.imag()).add(z.residual).add(std::string("continuum"));
    plot.series[1].x.push_back(z.value.real());
    plot.series[1].y.push_back(z.value.imag());
  }
  run.write_csv("resonance.csv", t);
  run.write_csv("candidates.csv", c);
  run.write_svg("spectrum.svg", plot);
  run.results["record"] = record_node(r.record);
  run.results["selected"] = static_cast<int>(r.selection.resonances.size());
  run.results["expected"] = r.selection.expected;
  if (!r.record.ok) run.fail_solver(r.record.failure);
  else if (!r.record.failure.empty()) run.warn(r.record.failure);
  run.summary = r.record.ok ? "Z = " + format_double(r.record.re) + " " + format_double(r.record.im) + "i"
                            : "no resonance selected";
}

void cmd_sweep_theta(Run& run) {
  const auto& cfg = run.cfg();
  require_regime(cfg, Regime::ResonantBothEnds, Command::SweepTheta);
  std::vector<double> betas = cfg.distortion.beta_list.empty() ? default_beta_list() : cfg.distortion.beta_list;
  if (betas.size() < 3) throw ConfigError("distortion.beta_list", "sweep_theta needs at least 3 values");
  // The smallest beta has the longest damping length, so its grid serves all.
  const double beta_min = *std::min_element(betas.begin(), betas.end());
  if (!(beta_min > 0.0)) throw ConfigError("distortion.beta_list", "sweep_theta needs positive values");
  const Prepared p = prepare(cfg, initial_reference(run), cfg.field_config(), beta_min);
  run.resolved["reference"] = reference_node(p.ref);
  run.resolved["distortion"] = params_node(p.params);
  run.resolved["grid"] = grid_node(p.grid);
  const WaveguideSetup setup = cfg.setup();
  const SolverOptions opts = cfg.solver_options();
  std::vector<std::function<ResonanceRun()>> jobs;
  for (double b : betas) {
    jobs.push_back([&, b] {
      DistortionParams q = p.params;
      q.beta = b;
      return solve_resonance(setup, q, p.grid, p.ref.e0(), Complex(p.ref.e0(), 0.0), opts);
    });
  }
  const auto runs = dispatch<ResonanceRun>(jobs, cfg.solver.workers);
  CsvTable t(kSweepHeader);
  std::vector<std::optional<ResonanceEstimate>> values;
  std::vector<std::string> failures;
  PlotSpec plot{"Z(beta)", "Re Z", "Im Z", {{"Z(beta)", {}, {}, true}}};
  for (const auto& r : runs) {
    add_record(t, r.record);
    run.results["records"].push_back(record_node(r.record));
    run.log("beta = " + format_double(r.record.beta) + ": " + format_double(r.record.re) + " " +
            format_double(r.record.im) + "i");
    if (r.record.ok) {
      values.push_back(r.selection.resonances.front());
      failures.emplace_back();
      plot.series[0].x.push_back(r.record.re);
      plot.series[0].y.push_back(r.record.im);
    } else {
      values.emplace_back();
      failures.push_back(r.record.failure);
    }
  }
  const double tol = cfg.plateau.drift_tol * std::abs(p.params.reference_energy);
  const PlateauReport rep = plateau_report(betas, values, failures, tol);
  run.write_csv("sweep_theta.csv", t);
  run.write_svg("theta_trajectory.svg", plot);
  run.results["plateau"]["verdict"] = std::string(to_string(rep.verdict));
  run.results["plateau"]["drift_tol"] = tol;
  run.results["plateau"]["max_drift"] = rep.max_drift;
  run.results["plateau"]["overall_drift"] = rep.overall_drift;
  if (rep.interval) {
    run.results["plateau"]["beta_from"] = betas[rep.interval->first];
    run.results["plateau"]["beta_to"] = betas[rep.interval->second];
  }
  for (const auto& r : runs) {
    if (!r.record.ok) run.fail_solver("beta = " + format_double(r.record.beta) + ": " + r.record.failure);
  }
  run.summary = "plateau " + std::string(to_string(rep.verdict)) + ", drift " + format_double(rep.max_drift);
}

void cmd_sweep_field(Run& run) {
  const auto& cfg = run.cfg();
  require_regime(cfg, Regime::ResonantBothEnds, Command::SweepField);
  const std::vector<double> ladder = cfg.field.F_list.empty() ? default_field_ladder() : cfg.field.F_list;
  if (ladder.size() < 2) throw ConfigError("field.F_list", "sweep_field needs at least 2 values");
  if (cfg.grid.Ns) run.warn("grid.Ns is ignored by sweep_field; the grid follows grid.hs");
  RunConfig auto_ns = cfg;
  auto_ns.grid.Ns.reset();
  const ReferenceSolve ref = initial_reference(run);
  const DistortionParams params = resolve_distortion(auto_ns, ref, cfg.distortion.beta);
  run.resolved["reference"] = reference_node(ref);
  run.resolved["distortion"] = params_node(params);
  const WaveguideSetup base = cfg.setup();
  const double a0 = total_bend(base.geometry);
  const SolverOptions opts = cfg.solver_options();
  std::vector<Grid> grids;
  for (double F : ladder) {
    grids.push_back(resolve_grid(auto_ns, params, FieldConfig{F, cfg.field.eta}, a0));
    YAML::Node g = grid_node(grids.back());
    g["F"] = F;
    run.resolved["grids"].push_back(g);
  }
  std::vector<ResonanceRun> runs;
  const auto solve_one = [&](std::size_t i, Complex target) {
    WaveguideSetup s = base;
    s.field.strength = ladder[i];
    return solve_resonance(s, params, grids[i], ref.e0(), target, opts);
  };
  if (cfg.solver.workers <= 1) {
    // Sequential sweeps warm-start each target from the previous Z(F).
    Complex target(ref.e0(), 0.0);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      runs.push_back(solve_one(i, target));
      const auto& r = runs.back().record;
      run.log("F = " + format_double(r.F) + ": " + format_double(r.re) + " " + format_double(r.im) + "i (" +
              format_double(r.wall_time) + " s)");
      if (r.ok) target = Complex(r.re, 0.0);
    }
  } else {
    std::vector<std::function<ResonanceRun()>> jobs;
    for (std::size_t i = 0; i < ladder.size(); ++i) jobs.push_back([&, i] { return solve_one(i, {ref.e0(), 0.0}); });
    runs = dispatch<ResonanceRun>(jobs, cfg.solver.workers);
  }
  std::vector<SweepRecord> records;
  CsvTable t(kSweepHeader);
  PlotSpec traj{"Z(F) trajectory", "Re Z", "Im Z", {{"Z(F)", {}, {}, true}, {"E0", {ref.e0()}, {0.0}, false}}};
  PlotSpec width{"Resonance width", "1/F", "ln|Im Z|", {{"data", {}, {}, false}, {"fit", {}, {}, true}}};
  for (const auto& r : runs) {
    records.push_back(r.record);
    add_record(t, r.record);
    run.results["records"].push_back(record_node(r.record));
    if (!r.record.ok) {
      run.fail_solver("F = " + format_double(r.record.F) + ": " + r.record.failure);
      continue;
    }
    traj.series[0].x.push_back(r.record.re);
    traj.series[0].y.push_back(r.record.im);
    if (r.record.im < 0.0) {
      width.series[0].x.push_back(1.0 / r.record.F);
      width.series[0].y.push_back(std::log(-r.record.im));
    }
  }
  run.write_csv("sweep_field.csv", t);
  run.write_svg("trajectory.svg", traj);

  // Surfaced, not enforced: |Z(F) - E0| should shrink along the tail.
  bool monotone = true;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    if (!a.ok || !b.ok) continue;
    const double da = std::abs(Complex(a.re - ref.e0(), a.im));
    const double db = std::abs(Complex(b.re - ref.e0(), b.im));
    if ((b.F < a.F) != (db < da)) monotone = false;
  }
  run.results["monotone_approach"] = monotone;
  if (!monotone) run.warn("|Z(F) - E0| is not monotone along the ladder");

  try {
    const WidthFit fit = fit_width(records);
    CsvTable w({"c1", "c2", "r_squared", "F_min", "F_max", "used"});
    w.row().add(fit.c1).add(fit.c2).add(fit.r_squared).add(fit.f_min).add(fit.f_max).add(fit.used);
    run.write_csv("width_fit.csv", w);
    run.results["width_fit"]["c1"] = fit.c1;
    run.results["width_fit"]["c2"] = fit.c2;
    run.results["width_fit"]["r_squared"] = fit.r_squared;
    run.results["width_fit"]["confirms_exponential_law"] = fit.confirms_exponential_law();
    if (!fit.confirms_exponential_law()) run.warn("fitted slope of ln|Im Z| against 1/F is nonnegative");
    for (double x = 1.0 / fit.f_max; x <= 1.0 / fit.f_min * (1 + 1e-12); x += (1.0 / fit.f_min - 1.0 / fit.f_max) / 20) {
      width.series[1].x.push_back(x);
      width.series[1].y.push_back(std::log(fit.c1) - fit.c2 * x);
    }
    run.summary = "c2 = " + format_double(fit.c2) + ", R^2 = " + format_double(fit.r_squared);
  } catch (const InvalidArgument& e) {
    run.fail_solver(std::string("width fit: ") + e.what());
    run.summary = "width fit unavailable";
  }
  run.write_svg("width.svg", width);
}

void cmd_confining(Run& run) {
  const auto& cfg = run.cfg();
  require_regime(cfg, Regime::Confining, Command::Confining);
  if (cfg.grid.Ns) run.warn("grid.Ns is ignored by confining; the grid follows grid.hs");
  const WaveguideSetup setup = cfg.setup();
  CsvTable t({"L", "Ns", "Nu", "cap", "count"});
  std::vector<int> counts;
  double cap = 0.0;
  for (double L : cfg.confining.L_list) {
    const Grid grid = Grid::with_spacing(L, cfg.grid.hs, cfg.grid.Nu, cfg.geometry.d);
    cap = discrete_threshold(grid) + cfg.confining.cap_offset;
    const OperatorMatrix op = assemble(OperatorKind::Stark, setup, std::nullopt, grid);
    counts.push_back(count_below(op.real(), cap));
    t.row().add(grid.half_length).add(grid.ns).add(grid.nu).add(cap).add(counts.back());
    run.log("L = " + format_double(L) + ": " + std::to_string(counts.back()) + " eigenvalues below " +
            format_double(cap));
  }
  run.write_csv("confining.csv", t);
  const bool stable = counts.size() >= 2 && counts[counts.size() - 1] == counts[counts.size() - 2];
  run.results["stabilized"] = stable;
  for (int c : counts) run.results["counts"].push_back(c);
  if (!stable) run.warn("eigenvalue count below the cap has not stabilized");
  run.summary = "counts below cap: " + std::to_string(counts.front()) + " ... " + std::to_string(counts.back());
}

}  // namespace

RunOutcome run_command(Command command, const RunConfig& config, const std::optional<std::filesystem::path>& dir,
                       std::ostream* log) {
  Run run(command, config, dir ? *dir : output_directory(config), log);
  std::string kind;
  std::string message;
  try {
    switch (command) {
      case Command::Check: cmd_check(run); break;
      case Command::Modes: cmd_modes(run); break;
      case Command::Bound: cmd_bound(run); break;
      case Command::Resonance: cmd_resonance(run); break;
      case Command::SweepTheta: cmd_sweep_theta(run); break;
      case Command::SweepField: cmd_sweep_field(run); break;
      case Command::Confining: cmd_confining(run); break;
    }
  } catch (const ConfigError& e) {
    kind = "validation";
    message = e.what();
    run.exit_code = kExitValidation;
  } catch (const InvalidArgument& e) {
    kind = "validation";
    message = e.what();
    run.exit_code = kExitValidation;
  } catch (const RegimeMismatch& e) {
    kind = "validation";
    message = e.what();
    run.exit_code = kExitValidation;
  } catch (const GeometryViolation& e) {
    kind = "validation";
    message = e.what();
    run.exit_code = kExitValidation;
  } catch (const std::exception& e) {
    kind = "solver";
    message = e.what();
    run.exit_code = kExitSolver;
  }
  if (!kind.empty()) run.summary = kind + " error: " + message;
  run.write_manifest(kind, message);
  return {run.exit_code, run.out().dir(), run.summary, run.warnings};
}

}  // namespace wgstark::lab
