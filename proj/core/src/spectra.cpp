#include "wgstark/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <arpack/arpack.hpp>

#include "wgstark/errors.hpp"

namespace wgstark {

namespace {

using SparseC = Eigen::SparseMatrix<Complex>;
using SparseD = Eigen::SparseMatrix<double>;
using LU = Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>>;

SparseC identity_like(Eigen::Index n) {
  SparseC id(n, n);
  id.setIdentity();
  return id;
}

/// Factorizes M - sigma, nudging sigma off the spectrum if the factorization is singular.
Complex factor_shifted(const SparseC& m, Complex sigma, LU& lu) {
  const SparseC id = identity_like(m.rows());
  Complex shift = sigma;
  for (int attempt = 0; attempt < 4; ++attempt) {
    SparseC shifted = m - shift * id;
    shifted.makeCompressed();
    lu.compute(shifted);
    if (lu.info() == Eigen::Success) return shift;
    const double nudge = 1e-9 * std::max(1.0, std::abs(sigma)) * std::pow(10.0, attempt);
    shift = sigma + Complex(nudge, nudge);
  }
  std::ostringstream os;
  os << "sparse LU of M - sigma failed near sigma = " << sigma << ": " << lu.lastErrorMessage();
  throw FactorizationFailure(os.str());
}

Eigen::VectorXcd start_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = dist(rng);
    const double im = dist(rng);
    v[i] = Complex(re, im);
  }
  return v;
}

void sort_by_distance(std::vector<Eigenpair>& pairs, Complex target) {
  std::stable_sort(pairs.begin(), pairs.end(), [&](const Eigenpair& a, const Eigenpair& b) {
    const double da = std::abs(a.value - target);
    const double db = std::abs(b.value - target);
    if (da != db) return da < db;
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
}

struct ArnoldiResult {
  std::vector<Eigenpair> pairs;
  bool complete = false;
};

ArnoldiResult arnoldi(const SparseC& m, Complex target, int nev, int ncv, const SolverOptions& opt) {
  const auto n = static_cast<int>(m.rows());
  LU lu;
  const Complex sigma = factor_shifted(m, target, lu);

  std::vector<Complex> resid(static_cast<std::size_t>(n));
  {
    const Eigen::VectorXcd s = start_vector(n, opt.seed);
    std::copy(s.data(), s.data() + n, resid.begin());
  }
  std::vector<Complex> v(static_cast<std::size_t>(n) * ncv);
  std::vector<Complex> workd(3 * static_cast<std::size_t>(n));
  const int lworkl = 3 * ncv * ncv + 5 * ncv;
  std::vector<Complex> workl(static_cast<std::size_t>(lworkl));
  std::vector<double> rwork(static_cast<std::size_t>(ncv));
  a_int iparam[11] = {};
  a_int ipntr[14] = {};
  iparam[0] = 1;
  iparam[2] = opt.max_iter;
  iparam[3] = 1;
  iparam[6] = 3;
  a_int ido = 0;
  a_int info = 1;
  Eigen::VectorXcd x(n);
  while (true) {
    arpack::naupd(ido, arpack::bmat::identity, n, arpack::which::largest_magnitude, nev, opt.tol, resid.data(), ncv,
                  v.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, rwork.data(), info);
    if (ido != -1 && ido != 1) break;
    Complex* in = workd.data() + ipntr[0] - 1;
    Complex* out = workd.data() + ipntr[1] - 1;
    x = Eigen::Map<Eigen::VectorXcd>(in, n);
    Eigen::Map<Eigen::VectorXcd>(out, n) = lu.solve(x);
  }
  if (info < 0) {
    std::ostringstream os;
    os << "znaupd failed with info = " << info;
    throw ConvergenceFailure(os.str());
  }
  ArnoldiResult result;
  const int converged = static_cast<int>(iparam[4]);
  if (converged <= 0) return result;

  std::vector<a_int> select(static_cast<std::size_t>(ncv));
  std::vector<Complex> d(static_cast<std::size_t>(nev) + 1);
  std::vector<Complex> z(static_cast<std::size_t>(n) * nev);
  std::vector<Complex> workev(2 * static_cast<std::size_t>(ncv));
  a_int einfo = 0;
  arpack::neupd(1, arpack::howmny::ritz_vectors, select.data(), d.data(), z.data(), n, sigma, workev.data(),
                arpack::bmat::identity, n, arpack::which::largest_magnitude, nev, opt.tol, resid.data(), ncv,
                v.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, rwork.data(), einfo);
  if (einfo != 0) {
    std::ostringstream os;
    os << "zneupd failed with info = " << einfo;
    throw ConvergenceFailure(os.str());
  }
  const int available = std::min(converged, nev);
  for (int i = 0; i < available; ++i) {
    Eigenpair p;
    p.value = d[static_cast<std::size_t>(i)];
    p.vector = Eigen::Map<Eigen::VectorXcd>(z.data() + static_cast<std::size_t>(i) * n, n);
    const double norm = p.vector.norm();
    if (norm > 0) p.vector /= norm;
    p.residual = residual_norm(m, p.value, p.vector);
    result.pairs.push_back(std::move(p));
  }
  result.complete = available >= nev && info == 0;
  return result;
}

Eigen::MatrixXcd to_dense(const SparseC& m) { return Eigen::MatrixXcd(m); }

}  // namespace

double residual_norm(const SparseC& m, Complex value, const Eigen::VectorXcd& v) {
  const double norm = v.norm();
  if (norm == 0.0) return std::numeric_limits<double>::infinity();
  return (m * v - value * v).norm() / norm;
}

std::vector<Complex> dense_eigenvalues(const SparseC& m) {
  Eigen::MatrixXcd a = to_dense(m);
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<Complex> w(static_cast<std::size_t>(n));
  Complex dummy;
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(), &dummy, 1, &dummy, 1);
  if (info != 0) {
    std::ostringstream os;
    os << "zgeev failed with info = " << info;
    throw ConvergenceFailure(os.str());
  }
  return w;
}

std::vector<Eigenpair> dense_eigs_near(const SparseC& m, Complex target, int k) {
  Eigen::MatrixXcd a = to_dense(m);
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<Complex> w(static_cast<std::size_t>(n));
  Eigen::MatrixXcd vr(n, n);
  Complex dummy;
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, w.data(), &dummy, 1, vr.data(), n);
  if (info != 0) {
    std::ostringstream os;
    os << "zgeev failed with info = " << info;
    throw ConvergenceFailure(os.str());
  }
  std::vector<Eigenpair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (lapack_int i = 0; i < n; ++i) {
    Eigenpair p;
    p.value = w[static_cast<std::size_t>(i)];
    p.vector = vr.col(i);
    pairs.push_back(std::move(p));
  }
  sort_by_distance(pairs, target);
  if (static_cast<int>(pairs.size()) > k) pairs.resize(static_cast<std::size_t>(k));
  for (auto& p : pairs) p.residual = residual_norm(m, p.value, p.vector);
  return pairs;
}

std::vector<Eigenpair> complex_eigs_near(const SparseC& m, Complex target, const SolverOptions& options) {
  const auto n = static_cast<int>(m.rows());
  if (n == 0) return {};
  const int k = std::max(1, options.k);
  const bool tiny = n < std::max(50, 2 * k + 20);
  if (options.method == SolverOptions::Method::Dense || tiny) return dense_eigs_near(m, target, k);

  const int nev = std::min(k, n - 2);
  int ncv = options.ncv > 0 ? options.ncv : std::max(2 * nev + 1, nev + 20);
  ncv = std::min(ncv, n);
  ArnoldiResult r = arnoldi(m, target, nev, ncv, options);
  if (!r.complete && ncv < n) {
    r = arnoldi(m, target, nev, std::min(n, 2 * ncv), options);
  }
  if (!r.complete) {
    if (options.method == SolverOptions::Method::Auto && static_cast<std::size_t>(n) <= options.dense_limit) {
      return dense_eigs_near(m, target, k);
    }
    std::ostringstream os;
    os << "shift-invert Arnoldi stagnated: " << r.pairs.size() << " of " << nev << " pairs converged";
    throw ConvergenceFailure(os.str());
  }
  sort_by_distance(r.pairs, target);
  return r.pairs;
}

std::vector<Eigenpair> complex_eigs_near(const OperatorMatrix& op, Complex target, const SolverOptions& options) {
  return complex_eigs_near(op.matrix, target, options);
}

int count_below(const SparseD& m, double cap) {
  SparseD id(m.rows(), m.cols());
  id.setIdentity();
  SparseD shifted = m - cap * id;
  Eigen::SimplicialLDLT<SparseD, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw FactorizationFailure("LDL^T factorization for the inertia count failed");
  const Eigen::VectorXd d = ldlt.vectorD();
  int negative = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i])) throw FactorizationFailure("LDL^T pivot is not finite");
    if (d[i] < 0.0) ++negative;
  }
  return negative;
}

namespace {

double gershgorin_lower(const SparseD& m) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m.rows());
  Eigen::VectorXd off = Eigen::VectorXd::Zero(m.rows());
  for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
    for (SparseD::InnerIterator it(m, c); it; ++it) {
      if (it.row() == it.col()) {
        diag[it.row()] += it.value();
      } else {
        off[it.row()] += std::abs(it.value());
      }
    }
  }
  return (diag - off).minCoeff();
}

}  // namespace

BoundStates bound_states(const OperatorMatrix& op, double lambda0, int k, double gap_tol) {
  if (!op.is_hermitian) throw InvalidArgument("bound_states needs a Hermitian operator");
  BoundStates result;
  const SparseD a = op.real();
  const double upper = lambda0 - gap_tol;
  const int m = count_below(a, upper);
  if (m == 0 || k <= 0) return result;
  const int want = std::min(m, k);

  SolverOptions opt;
  opt.tol = 1e-13;
  double lo = gershgorin_lower(a) - 1.0;
  int found = 0;
  std::vector<Eigenpair> states;
  while (found < want) {
    double left = lo;
    double right = upper;
    int right_count = m;
    for (int iter = 0; iter < 80; ++iter) {
      if (right - left <= 1e-7 * std::max(1.0, std::abs(right))) break;
      const double mid = 0.5 * (left + right);
      const int c = count_below(a, mid);
      if (c >= found + 1) {
        right = mid;
        right_count = c;
      } else {
        left = mid;
      }
    }
    const int group = right_count - found;
    opt.k = group + 2;
    const double sigma = 0.5 * (left + right);
    std::vector<Eigenpair> near = complex_eigs_near(op.matrix, Complex(sigma, 0.0), opt);
    int taken = 0;
    for (auto& p : near) {
      const double tol = 1e-9 * std::max(1.0, std::abs(sigma));
      if (p.value.real() >= left - tol && p.value.real() <= right + tol && taken < group) {
        p.value = Complex(p.value.real(), 0.0);
        p.residual = residual_norm(op.matrix, p.value, p.vector);
        if (p.residual > 1e-8) {
          std::ostringstream os;
          os << "bound state at " << p.value.real() << " has residual " << p.residual;
          throw ConvergenceFailure(os.str());
        }
        states.push_back(std::move(p));
        ++taken;
      }
    }
    if (taken < group) throw ConvergenceFailure("shift-invert missed an eigenvalue isolated by bisection");
    found += group;
    lo = right;
  }
  std::sort(states.begin(), states.end(),
            [](const Eigenpair& x, const Eigenpair& y) { return x.value.real() < y.value.real(); });
  if (static_cast<int>(states.size()) > k) states.resize(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < states.size();) {
    std::size_t j = i + 1;
    while (j < states.size() && states[j].value.real() - states[j - 1].value.real() < 1e-9) ++j;
    result.multiplicity.push_back(static_cast<int>(j - i));
    i = j;
  }
  result.states = std::move(states);
  return result;
}

Selection select_resonances(const std::vector<Eigenpair>& candidates, const SelectionRule& rule, const Grid& grid) {
  Selection sel;
  sel.expected = rule.expected;
  for (const auto& c : candidates) {
    ResonanceEstimate r;
    r.value = c.value;
    r.residual = c.residual;
    r.beta = rule.beta;
    r.grid = grid;
    const bool near = std::abs(c.value.real() - rule.e0) < rule.window;
    const bool strip = c.value.imag() > -0.5 * rule.beta && c.value.imag() <= rule.tol_im;
    const bool clean = c.residual <= rule.residual_tol;
    if (near && strip && clean) {
      r.cluster = 0;
      sel.resonances.push_back(r);
    } else {
      r.cluster = 1;
      sel.continuum.push_back(r);
    }
  }
  std::stable_sort(sel.resonances.begin(), sel.resonances.end(), [&](const auto& x, const auto& y) {
    return std::abs(x.value - rule.e0) < std::abs(y.value - rule.e0);
  });
  return sel;
}

std::string_view to_string(PlateauReport::Verdict verdict) {
  switch (verdict) {
    case PlateauReport::Verdict::Stable: return "stable";
    case PlateauReport::Verdict::Unstable: return "unstable";
    case PlateauReport::Verdict::InsufficientData: return "insufficient data";
  }
  return "?";
}

PlateauReport plateau_report(std::vector<double> betas, std::vector<std::optional<ResonanceEstimate>> values,
                             std::vector<std::string> failures, double drift_tol) {
  PlateauReport rep;
  rep.betas = std::move(betas);
  rep.values = std::move(values);
  rep.failures = std::move(failures);
  rep.failures.resize(rep.values.size());
  const std::size_t n = rep.values.size();

  auto drift = [&](std::size_t a, std::size_t b) {
    double worst = 0.0;
    for (std::size_t i = a; i <= b; ++i) {
      for (std::size_t j = i + 1; j <= b; ++j) {
        worst = std::max(worst, std::abs(rep.values[i]->value - rep.values[j]->value));
      }
    }
    return worst;
  };

  std::size_t valid = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rep.values[i]) continue;
    ++valid;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rep.values[j]) {
        rep.overall_drift = std::max(rep.overall_drift, std::abs(rep.values[i]->value - rep.values[j]->value));
      }
    }
  }
  if (n < 3 || valid < 3) {
    rep.verdict = PlateauReport::Verdict::InsufficientData;
    rep.max_drift = rep.overall_drift;
    return rep;
  }

  std::size_t best_len = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (!rep.values[a]) continue;
    std::size_t b = a;
    while (b + 1 < n && rep.values[b + 1] && drift(a, b + 1) <= drift_tol) ++b;
    const std::size_t len = b - a + 1;
    if (len >= 3 && len > best_len) {
      best_len = len;
      rep.interval = std::make_pair(a, b);
    }
  }
  if (rep.interval) {
    rep.verdict = PlateauReport::Verdict::Stable;
    rep.max_drift = drift(rep.interval->first, rep.interval->second);
    return rep;
  }
  rep.verdict = PlateauReport::Verdict::Unstable;
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a + 2 < n; ++a) {
    if (rep.values[a] && rep.values[a + 1] && rep.values[a + 2]) smallest = std::min(smallest, drift(a, a + 2));
  }
  rep.max_drift = std::isfinite(smallest) ? smallest : rep.overall_drift;
  return rep;
}

PlateauReport theta_plateau(const WaveguideSetup& setup, const DistortionParams& base, const Grid& grid,
                            const std::vector<double>& betas, double e0, double drift_tol,
                            const SolverOptions& options) {
  std::vector<std::optional<ResonanceEstimate>> values(betas.size());
  std::vector<std::string> failures(betas.size());
  for (std::size_t i = 0; i < betas.size(); ++i) {
    DistortionParams p = base;
    p.beta = betas[i];
    try {
      const OperatorMatrix op = assemble(OperatorKind::DistortedStark, setup, p, grid);
      const auto pairs = complex_eigs_near(op, Complex(e0, 0.0), options);
      SelectionRule rule;
      rule.e0 = e0;
      rule.beta = p.beta;
      rule.window = p.window;
      const Selection sel = select_resonances(pairs, rule, grid);
      if (sel.resonances.empty()) {
        failures[i] = "no eigenvalue passed the resonance selection";
      } else {
        values[i] = sel.resonances.front();
      }
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  }
  return plateau_report(betas, std::move(values), std::move(failures), drift_tol);
}

SectorProbe sector_probe(const OperatorMatrix& op, double lambda0, double re_lo, double re_hi,
                         const SolverOptions& options) {
  SectorProbe probe;
  const double width = re_hi - re_lo;
  if (!(width > 0.0)) throw InvalidArgument("sector window must have re_hi > re_lo");
  const int targets = std::max(1, static_cast<int>(std::ceil(width / 0.25)));
  const double spacing = width / targets;
  std::vector<Complex> found;
  for (int t = 0; t <= targets; ++t) {
    const Complex target(re_lo + t * spacing, 0.0);
    SolverOptions opt = options;
    opt.k = std::max(options.k, 12);
    while (true) {
      const auto pairs = complex_eigs_near(op, target, opt);
      double reach = 0.0;
      for (const auto& p : pairs) reach = std::max(reach, std::abs(p.value - target));
      const bool covered = reach >= 0.75 * spacing || opt.k >= 96 ||
                           static_cast<std::size_t>(opt.k) + 2 >= op.size();
      if (covered) {
        for (const auto& p : pairs) found.push_back(p.value);
        break;
      }
      opt.k *= 2;
    }
  }
  std::sort(found.begin(), found.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (const Complex z : found) {
    if (z.real() < re_lo || z.real() > re_hi) continue;
    bool duplicate = false;
    for (const Complex w : probe.eigenvalues) {
      if (std::abs(z - w) <= 1e-9 * std::max(1.0, std::abs(z))) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) probe.eigenvalues.push_back(z);
  }
  probe.max_imag = -std::numeric_limits<double>::infinity();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const Complex z : probe.eigenvalues) {
    probe.max_imag = std::max(probe.max_imag, z.imag());
    if (z.real() >= lambda0) {
      const double x = z.real() - lambda0;
      sx += x;
      sy += z.imag();
      sxx += x * x;
      sxy += x * z.imag();
      ++count;
    }
  }
  if (count >= 2) {
    const double det = count * sxx - sx * sx;
    if (det != 0.0) {
      probe.slope = (count * sxy - sx * sy) / det;
      probe.offset = (sy - probe.slope * sx) / count;
    }
  }
  return probe;
}

double birman_schwinger_norm(const CoefficientTable& table, Complex z, double rel_tol, int max_iter) {
  if (!table.params()) throw InvalidArgument("Birman-Schwinger operator needs a distorted coefficient table");
  const OperatorMatrix a = assemble(OperatorKind::DistortedReference, table);
  const Eigen::VectorXcd v = perturbation_diagonal(table);
  if (v.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  LU lu;
  const SparseC id = identity_like(a.matrix.rows());
  SparseC shifted = a.matrix - z * id;
  shifted.makeCompressed();
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) {
    throw FactorizationFailure("H~0,theta(F) - z could not be factorized; z is too close to the spectrum");
  }
  Eigen::VectorXcd x = start_vector(a.matrix.rows(), 7);
  x.normalize();
  double previous = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXcd y = lu.solve(x);
    const Eigen::VectorXcd kx = v.cwiseProduct(y);
    // (A - z)^{-*} w = conj((A - z)^{-1} conj(w)) because A is complex symmetric.
    const Eigen::VectorXcd t = v.conjugate().cwiseProduct(kx).conjugate();
    const Eigen::VectorXcd q = Eigen::VectorXcd(lu.solve(t)).conjugate();
    const double sigma2 = q.norm();
    if (!std::isfinite(sigma2)) throw ConvergenceFailure("Birman-Schwinger power iteration diverged");
    if (sigma2 == 0.0) return 0.0;
    x = q / sigma2;
    const double sigma = std::sqrt(sigma2);
    if (iter > 0 && std::abs(sigma - previous) <= rel_tol * sigma) return sigma;
    previous = sigma;
  }
  throw ConvergenceFailure("Birman-Schwinger power iteration did not reach its tolerance");
}

double birman_schwinger_norm(const WaveguideSetup& setup, const DistortionParams& params, const Grid& grid, Complex z,
                             double rel_tol) {
  params.validate();
  validate_distortion_grid(grid, params, setup.field, setup.total_bend());
  const CoefficientTable table(setup, params, grid, true);
  return birman_schwinger_norm(table, z, rel_tol);
}

}  // namespace wgstark
