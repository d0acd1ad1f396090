#include "wgstark/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wgstark/errors.hpp"

namespace wgstark {

std::string WaveguideSetup::hash() const {
  std::ostringstream os;
  os.precision(17);
  os << geometry.model.describe() << ";d=" << geometry.width << ";F=" << field.strength
     << ";eta=" << field.direction;
  const std::string text = os.str();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Grid Grid::with_spacing(double half_length, double hs_target, int nu, double width) {
  if (!(hs_target > 0.0)) throw InvalidArgument("grid spacing must be positive");
  Grid g;
  g.half_length = half_length;
  g.ns = std::max(3, static_cast<int>(std::lround(2.0 * half_length / hs_target)) - 1);
  g.nu = nu;
  g.width = width;
  return g;
}

void Grid::validate() const {
  if (!(half_length > 0.0)) throw InvalidArgument("grid half-length L must be positive");
  if (ns < 3) throw InvalidArgument("grid needs Ns >= 3");
  if (nu < 3) throw InvalidArgument("grid needs Nu >= 3");
  if (!(width > 0.0)) throw InvalidArgument("strip width must be positive");
}

double discrete_threshold(const Grid& grid) {
  const double hu = grid.hu();
  return 2.0 / (hu * hu) * (1.0 - std::cos(std::numbers::pi / (grid.nu + 1)));
}

namespace {

void require_resonant(const FieldConfig& field, double alpha0) {
  const Regime r = classify_regime(field.direction, alpha0);
  if (r != Regime::ResonantBothEnds) {
    std::ostringstream os;
    os << "truncation policy needs the resonant regime, got " << to_string(r);
    throw RegimeMismatch(os.str());
  }
}

}  // namespace

std::pair<double, double> plateau_onsets(const DistortionParams& params, const FieldConfig& field, double alpha0) {
  require_resonant(field, alpha0);
  const double E = std::abs(params.reference_energy);
  return {E / (field.strength * std::cos(field.direction)),
          E / (field.strength * std::abs(std::cos(field.direction - alpha0)))};
}

double transition_width(const DistortionParams& params, const FieldConfig& field, double alpha0) {
  require_resonant(field, alpha0);
  const double c = std::min(std::abs(std::cos(field.direction)), std::abs(std::cos(field.direction - alpha0)));
  return params.window / (field.strength * c);
}

double default_margin(const DistortionParams& params, const FieldConfig& field, double alpha0) {
  return 5.0 + 3.0 * transition_width(params, field, alpha0);
}

double damping_length(const DistortionParams& params, const FieldConfig& field, double alpha0, double damping) {
  require_resonant(field, alpha0);
  if (!(params.beta > 0.0)) return 0.0;
  const double c = std::max(std::abs(std::cos(field.direction)), std::abs(std::cos(field.direction - alpha0)));
  const double ratio = damping / params.beta;
  return ratio * ratio * field.strength * c;
}

double auto_truncation(const DistortionParams& params, const FieldConfig& field, double alpha0, double margin) {
  const auto [left, right] = plateau_onsets(params, field, alpha0);
  return std::max(left, right) + margin;
}

void validate_distortion_grid(const Grid& grid, const DistortionParams& params, const FieldConfig& field,
                              double alpha0) {
  grid.validate();
  const auto [left, right] = plateau_onsets(params, field, alpha0);
  const double L = grid.half_length;
  const double hs = grid.hs();
  std::ostringstream os;
  if (!(std::max(left, right) + 2.0 * hs < L)) {
    os << "plateau onsets (" << left << ", " << right << ") not inside (-L, L) with margin, L = " << L;
    throw InvalidArgument(os.str());
  }
  const double width = transition_width(params, field, alpha0);
  if (width < 8.0 * hs) {
    os << "cutoff transition of width " << width << " resolved by fewer than 8 points (hs = " << hs << ")";
    throw InvalidArgument(os.str());
  }
  for (double s : {grid.s_half(0), grid.s(0), grid.s_half(1), grid.s(1), grid.s_half(grid.ns),
                   grid.s(grid.ns - 1), grid.s_half(grid.ns - 1), grid.s(grid.ns - 2)}) {
    const FieldValue f = distortion_field(params, field, alpha0, s);
    if (f.d1 != 0.0 || f.d2 != 0.0 || f.d3 != 0.0) {
      os << "distortion transition reaches the outermost cells at s = " << s;
      throw InvalidArgument(os.str());
    }
  }
}

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Waveguide: return "H";
    case OperatorKind::Stark: return "H(F)";
    case OperatorKind::ReferenceStark: return "H~0(F)";
    case OperatorKind::DistortedStark: return "H_theta(F)";
    case OperatorKind::DistortedReference: return "H~0,theta(F)";
    case OperatorKind::DistortedFree: return "H0,theta";
  }
  return "?";
}

bool is_distorted(OperatorKind kind) {
  return kind == OperatorKind::DistortedStark || kind == OperatorKind::DistortedReference ||
         kind == OperatorKind::DistortedFree;
}

bool uses_field(OperatorKind kind) {
  return kind == OperatorKind::Stark || kind == OperatorKind::ReferenceStark ||
         kind == OperatorKind::DistortedStark || kind == OperatorKind::DistortedReference;
}

Eigen::SparseMatrix<double> OperatorMatrix::real() const { return matrix.real(); }

CoefficientTable::CoefficientTable(const WaveguideSetup& setup, const std::optional<DistortionParams>& params,
                                   const Grid& grid, bool with_field)
    : setup_(setup), params_(params), grid_(grid), with_field_(with_field) {
  grid_.validate();
  if (std::abs(grid_.width - setup_.geometry.width) > 1e-14 * setup_.geometry.width) {
    throw InvalidArgument("grid width differs from the strip width");
  }
  // The distortion is shaped by F even when the field potentials are left out.
  const StarkField stark(setup_.geometry, setup_.field, grid_.half_length + 1.0);
  const DistortedProfile profile(stark, params_);

  const int ns = grid_.ns;
  const int nu = grid_.nu;
  const std::size_t n = grid_.size();
  flux_.resize(static_cast<std::size_t>(ns + 1) * nu);
  curvature_.resize(n);
  correction_.resize(n);
  stark_.resize(n);
  reference_.resize(n);
  node_field_.resize(static_cast<std::size_t>(ns));

  for (int i = 0; i <= ns; ++i) {
    DistortedProfile::Column col = profile.column(grid_.s_half(i));
    for (int j = 0; j < nu; ++j) {
      flux_[static_cast<std::size_t>(i) * nu + j] = profile.at(col, grid_.u(j)).flux;
    }
  }
  for (int i = 0; i < ns; ++i) {
    DistortedProfile::Column col = profile.column(grid_.s(i));
    node_field_[static_cast<std::size_t>(i)] = col.f;
    for (int j = 0; j < nu; ++j) {
      const DistortedCoefficients c = profile.at(col, grid_.u(j));
      const std::size_t k = grid_.index(i, j);
      curvature_[k] = c.curvature;
      correction_[k] = c.correction;
      stark_[k] = with_field_ ? c.stark : Complex{};
      reference_[k] = with_field_ ? c.reference : Complex{};
    }
  }
}

OperatorMatrix assemble(OperatorKind kind, const CoefficientTable& table) {
  const bool distorted = is_distorted(kind);
  if (distorted && !table.params()) throw InvalidArgument("distorted operator needs distortion parameters");
  if (!distorted && table.params()) throw InvalidArgument("undistorted operator assembled from a distorted table");
  if (uses_field(kind) && !table.with_field()) throw InvalidArgument("coefficient table built without the field");

  const Grid& g = table.grid();
  const int ns = g.ns;
  const int nu = g.nu;
  const double hs2 = g.hs() * g.hs();
  const double hu2 = g.hu() * g.hu();
  const Complex transverse_off(-1.0 / hu2, 0.0);

  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(g.size() * 5);
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nu; ++j) {
      const std::size_t k = g.index(i, j);
      const Complex left = table.flux(i, j);
      const Complex right = table.flux(i + 1, j);
      Complex potential;
      switch (kind) {
        case OperatorKind::Waveguide:
          potential = table.correction(k) + table.curvature(k);
          break;
        case OperatorKind::Stark:
        case OperatorKind::DistortedStark:
          potential = table.correction(k) + table.curvature(k) + table.stark(k);
          break;
        case OperatorKind::ReferenceStark:
        case OperatorKind::DistortedReference:
          potential = table.correction(k) + table.reference(k);
          break;
        case OperatorKind::DistortedFree:
          potential = table.correction(k);
          break;
      }
      const auto row = static_cast<Eigen::Index>(k);
      entries.emplace_back(row, row, (left + right) / hs2 + 2.0 / hu2 + potential);
      if (i > 0) entries.emplace_back(row, row - nu, -left / hs2);
      if (i + 1 < ns) entries.emplace_back(row, row + nu, -right / hs2);
      if (j > 0) entries.emplace_back(row, row - 1, transverse_off);
      if (j + 1 < nu) entries.emplace_back(row, row + 1, transverse_off);
    }
  }
  OperatorMatrix op;
  const auto n = static_cast<Eigen::Index>(g.size());
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  op.matrix.makeCompressed();
  op.is_complex_symmetric = true;
  op.is_hermitian = !distorted;
  op.provenance.kind = kind;
  op.provenance.setup_hash = table.setup().hash();
  op.provenance.grid = g;
  op.provenance.params = table.params();
  return op;
}

OperatorMatrix assemble(OperatorKind kind, const WaveguideSetup& setup, const std::optional<DistortionParams>& params,
                        const Grid& grid) {
  const bool distorted = is_distorted(kind);
  std::optional<DistortionParams> used;
  std::optional<DistortionSampling> hints;
  if (distorted) {
    if (!params) throw InvalidArgument("distorted operator needs distortion parameters");
    params->validate();
    used = params;
    const double alpha0 = setup.total_bend();
    validate_distortion_grid(grid, *params, setup.field, alpha0);
    DistortionSampling sampling;
    sampling.field = [p = *params, f = setup.field, alpha0](double s) { return distortion_field(p, f, alpha0, s).f; };
    sampling.s_min = -grid.half_length;
    sampling.s_max = grid.half_length;
    hints = sampling;
  }
  const HypothesisReport report = check_hypotheses(setup.geometry, hints);
  if (!report.h1_ok || !report.h2_ok || (distorted && !report.h3_surrogate_ok)) {
    std::ostringstream os;
    os << "hypothesis gate failed (h1 " << report.h1_ok << ", h2 " << report.h2_ok << ", h3 "
       << report.h3_surrogate_ok << ")";
    throw InvalidArgument(os.str());
  }
  const CoefficientTable table(setup, used, grid, uses_field(kind));
  return assemble(kind, table);
}

Eigen::VectorXcd perturbation_diagonal(const CoefficientTable& table) {
  const std::size_t n = table.grid().size();
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    v[static_cast<Eigen::Index>(k)] = table.curvature(k) + table.stark(k) - table.reference(k);
  }
  return v;
}

std::vector<TransverseMode> transverse_modes(double width, int nu) {
  if (nu < 3) throw InvalidArgument("transverse_modes needs Nu >= 3");
  if (!(width > 0.0)) throw InvalidArgument("strip width must be positive");
  const double hu = width / (nu + 1);
  std::vector<TransverseMode> modes;
  modes.reserve(static_cast<std::size_t>(nu));
  for (int k = 1; k <= nu; ++k) {
    const double kp = k * std::numbers::pi;
    modes.push_back({k, 2.0 / (hu * hu) * (1.0 - std::cos(kp / (nu + 1))), kp * kp / (width * width)});
  }
  return modes;
}

void export_coordinate(const OperatorMatrix& op, std::ostream& out) {
  char line[128];
  for (Eigen::Index c = 0; c < op.matrix.outerSize(); ++c) {
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(op.matrix, c); it; ++it) {
      std::snprintf(line, sizeof line, "%lld %lld %.17g %.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value().real(), it.value().imag());
      out << line;
    }
  }
}

double max_asymmetry(const Eigen::SparseMatrix<Complex>& m) {
  const Eigen::SparseMatrix<Complex> t = m.transpose();
  const Eigen::SparseMatrix<Complex> d = m - t;
  double worst = 0.0;
  for (Eigen::Index c = 0; c < d.outerSize(); ++c) {
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(d, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

}  // namespace wgstark
