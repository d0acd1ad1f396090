#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "wgstark/errors.hpp"
#include "wgstark/spectra.hpp"

using namespace wgstark;
using SpC = Eigen::SparseMatrix<Complex>;

namespace {

SpC diagonal(const std::vector<Complex>& d) {
  SpC m(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  std::vector<Eigen::Triplet<Complex>> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpC laplacian_1d(int n) {
  std::vector<Eigen::Triplet<Complex>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0);
      t.emplace_back(i + 1, i, -1.0);
    }
  }
  SpC m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

DistortionParams params(double beta) {
  DistortionParams p;
  p.reference_energy = -0.04;
  p.window = 0.01;
  p.beta = beta;
  return p;
}

const WaveguideSetup kSetup{GeometrySetup{}, FieldConfig{0.02, 0.3}};
// n = 279 * 7 = 1953 for sparse work, 279 * 3 = 837 where a dense solve is compared.
const Grid kSmall = Grid::with_spacing(14.0, 0.1, 7, 1.0);
const Grid kDense = Grid::with_spacing(14.0, 0.1, 3, 1.0);
// the transition has width deltaE / F = 0.5 and needs hs well below 0.1
const Grid kFineS = Grid::with_spacing(14.0, 0.05, 3, 1.0);

Eigenpair pair_at(Complex z, double residual = 1e-12) { return {z, Eigen::VectorXcd(), residual}; }

}  // namespace

TEST(Eigs, DiagonalTargetIsExact) {
  const auto ev = complex_eigs_near(diagonal({1.0, Complex(0, 2), -3.0}), Complex(0, 2), SolverOptions{.k = 1});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev.front().value, Complex(0, 2));
}

TEST(Eigs, ShiftInvertOnLargeDiagonal) {
  std::vector<Complex> d;
  for (int i = 0; i < 400; ++i) d.emplace_back(0.01 * i, -0.001 * i);
  SolverOptions opts;
  opts.method = SolverOptions::Method::ShiftInvert;
  opts.k = 4;
  const auto ev = complex_eigs_near(diagonal(d), Complex(1.003, -0.1), opts);
  ASSERT_EQ(ev.size(), 4u);
  EXPECT_NEAR(std::abs(ev[0].value - Complex(1.0, -0.1)), 0.0, 1e-12);
  for (const auto& e : ev) EXPECT_LE(e.residual, 1e-10);
}

TEST(Eigs, HermitianInputGivesRealValues) {
  SolverOptions opts;
  opts.method = SolverOptions::Method::ShiftInvert;
  opts.k = 8;
  const auto ev = complex_eigs_near(laplacian_1d(300), Complex(0.5, 0.0), opts);
  for (const auto& e : ev) {
    EXPECT_LE(std::abs(e.value.imag()), 1e-10);
    // Exact spectrum 2 - 2 cos(k pi / 301).
    const double k = std::acos(1.0 - e.value.real() / 2.0) * 301.0 / M_PI;
    EXPECT_NEAR(k, std::round(k), 1e-6);
  }
}

TEST(Eigs, ResidualsAreRecomputed) {
  const auto op = assemble(OperatorKind::DistortedStark, kSetup, params(0.01), kSmall);
  SolverOptions opts;
  opts.method = SolverOptions::Method::ShiftInvert;
  const auto ev = complex_eigs_near(op, Complex(9.8, 0.0), opts);
  for (const auto& e : ev) {
    EXPECT_NEAR(e.residual, residual_norm(op.matrix, e.value, e.vector), 1e-15);
    EXPECT_LE(e.residual, 1e-8);
  }
}

TEST(Eigs, SparseMatchesDense) {
  const auto op = assemble(OperatorKind::DistortedStark, kSetup, params(0.01), kDense);
  SolverOptions opts;
  opts.method = SolverOptions::Method::ShiftInvert;
  opts.k = 6;
  const Complex target(9.8, 0.0);
  const auto sparse = complex_eigs_near(op, target, opts);
  const auto all = dense_eigenvalues(op.matrix);
  for (const auto& e : sparse) {
    double best = 1e300;
    for (Complex z : all) best = std::min(best, std::abs(z - e.value));
    EXPECT_LE(best, 1e-8) << e.value;
  }
  const auto dense = dense_eigs_near(op.matrix, target, 6);
  ASSERT_EQ(dense.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_LE(std::abs(dense[i].value - sparse[i].value), 1e-8);
}

TEST(Eigs, NegativeBetaConjugatesEigenvalues) {
  const CoefficientTable plus(kSetup, params(0.01), kSmall);
  const CoefficientTable minus(kSetup, params(-0.01), kSmall);
  SolverOptions opts;
  opts.method = SolverOptions::Method::ShiftInvert;
  opts.k = 4;
  const auto a = complex_eigs_near(assemble(OperatorKind::DistortedStark, plus), Complex(9.8, 0.0), opts);
  const auto b = complex_eigs_near(assemble(OperatorKind::DistortedStark, minus), Complex(9.8, 0.0), opts);
  for (const auto& e : a) {
    double best = 1e300;
    for (const auto& f : b) best = std::min(best, std::abs(std::conj(e.value) - f.value));
    EXPECT_LE(best, 1e-10);
  }
}

TEST(Inertia, CountBelowMatchesDense) {
  const auto op = assemble(OperatorKind::Stark, kSetup, std::nullopt, kDense);
  auto ev = dense_eigenvalues(op.matrix);
  for (double cap : {9.0, 10.5, 14.0, 40.0}) {
    const int dense = static_cast<int>(std::count_if(ev.begin(), ev.end(), [&](Complex z) { return z.real() < cap; }));
    EXPECT_EQ(count_below(op.real(), cap), dense) << cap;
  }
}

TEST(BoundStates, MatchDenseAndSitBelowThreshold) {
  const WaveguideSetup setup{GeometrySetup{}, FieldConfig{0.0, 0.3}};
  const Grid g = Grid::with_spacing(10.0, 0.1, 5, 1.0);
  const auto op = assemble(OperatorKind::Waveguide, setup, std::nullopt, g);
  const double lambda0 = discrete_threshold(g);
  const auto bs = bound_states(op, lambda0, 4);
  ASSERT_GE(bs.count(), 1);
  auto ev = dense_eigenvalues(op.matrix);
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  EXPECT_NEAR(bs.states[0].value.real(), ev[0].real(), 1e-9);
  for (const auto& st : bs.states) {
    EXPECT_LT(st.value.real(), lambda0);
    EXPECT_LE(st.residual, 1e-8);
  }
}

TEST(Selection, EmptyInput) {
  SelectionRule rule{9.8, 0.05, 0.01};
  const auto sel = select_resonances({}, rule);
  EXPECT_TRUE(sel.resonances.empty());
  EXPECT_TRUE(sel.continuum.empty());
  EXPECT_FALSE(sel.count_matches());
}

TEST(Selection, SeparatesResonanceFromContinuum) {
  const double beta = 0.05, e0 = 9.8;
  std::vector<Eigenpair> c{pair_at({e0, -1e-4})};
  for (int k = -3; k <= 3; ++k) c.push_back(pair_at({e0 + 0.002 * k, -beta}));
  const auto sel = select_resonances(c, SelectionRule{e0, beta, 0.01});
  ASSERT_EQ(sel.resonances.size(), 1u);
  EXPECT_EQ(sel.resonances[0].value, Complex(e0, -1e-4));
  EXPECT_EQ(sel.resonances[0].cluster, 0);
  EXPECT_EQ(sel.continuum.size(), 7u);
  EXPECT_TRUE(sel.count_matches());
}

TEST(Selection, RejectsLargeResidualAndPositiveImag) {
  std::vector<Eigenpair> c{pair_at({9.8, -1e-4}, 1e-3), pair_at({9.8, 1e-3})};
  const auto sel = select_resonances(c, SelectionRule{9.8, 0.05, 0.01});
  EXPECT_TRUE(sel.resonances.empty());
}

TEST(Plateau, ConstantValuesAreStable) {
  std::vector<double> betas{0.03, 0.04, 0.05, 0.06};
  std::vector<std::optional<ResonanceEstimate>> values(4, ResonanceEstimate{{9.8, -1e-4}});
  const auto rep = plateau_report(betas, values, std::vector<std::string>(4), 1e-6);
  EXPECT_EQ(rep.verdict, PlateauReport::Verdict::Stable);
  EXPECT_EQ(rep.max_drift, 0.0);
  ASSERT_TRUE(rep.interval.has_value());
  EXPECT_EQ(rep.interval->first, 0u);
  EXPECT_EQ(rep.interval->second, 3u);
}

TEST(Plateau, SingleValueIsInsufficient) {
  const auto rep = plateau_report({0.05}, {ResonanceEstimate{{9.8, -1e-4}}}, {""}, 1e-6);
  EXPECT_EQ(rep.verdict, PlateauReport::Verdict::InsufficientData);
}

TEST(Plateau, DriftingValuesAreUnstable) {
  std::vector<double> betas{0.03, 0.04, 0.05, 0.06};
  std::vector<std::optional<ResonanceEstimate>> values;
  for (int i = 0; i < 4; ++i) values.push_back(ResonanceEstimate{{9.8 + 1e-3 * i, -1e-4}});
  const auto rep = plateau_report(betas, values, std::vector<std::string>(4), 1e-6);
  EXPECT_EQ(rep.verdict, PlateauReport::Verdict::Unstable);
  EXPECT_NEAR(rep.max_drift, 2e-3, 1e-12);
}

TEST(Plateau, FindsSubInterval) {
  std::vector<double> betas{0.02, 0.03, 0.04, 0.05, 0.06};
  std::vector<std::optional<ResonanceEstimate>> values{ResonanceEstimate{{9.7, -1e-4}},
                                                       ResonanceEstimate{{9.8, -1e-4}},
                                                       ResonanceEstimate{{9.8, -1e-4 - 1e-9}},
                                                       ResonanceEstimate{{9.8, -1e-4}},
                                                       std::nullopt};
  const auto rep = plateau_report(betas, values, {"", "", "", "", "failed"}, 1e-8);
  EXPECT_EQ(rep.verdict, PlateauReport::Verdict::Stable);
  ASSERT_TRUE(rep.interval.has_value());
  EXPECT_EQ(rep.interval->first, 1u);
  EXPECT_EQ(rep.interval->second, 3u);
}

TEST(SectorProbe, ZeroBetaIsReal) {
  const auto op = assemble(OperatorKind::DistortedFree, kSetup, params(0.0), kSmall);
  const double lambda0 = discrete_threshold(kSmall);
  const auto probe = sector_probe(op, lambda0, lambda0 - 1.0, lambda0 + 2.0);
  ASSERT_FALSE(probe.eigenvalues.empty());
  for (Complex z : probe.eigenvalues) EXPECT_LE(std::abs(z.imag()), 1e-10);
}

TEST(SectorProbe, DistortedFreeRotatesDown) {
  // beta sup|f'| = 2 beta / deltaE < 1 keeps the distortion perturbative.
  const auto op = assemble(OperatorKind::DistortedFree, kSetup, params(0.004), kFineS);
  const double lambda0 = discrete_threshold(kFineS);
  const auto probe = sector_probe(op, lambda0, lambda0 - 1.0, lambda0 + 2.0);
  ASSERT_FALSE(probe.eigenvalues.empty());
  EXPECT_LE(probe.max_imag, 1e-8);
}

TEST(BirmanSchwinger, ContinuousAlongVerticalLine) {
  const CoefficientTable table(kSetup, params(0.05), kSmall);
  double prev = -1.0;
  for (double y : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double n = birman_schwinger_norm(table, Complex(9.8, y));
    EXPECT_GT(n, 0.0);
    EXPECT_TRUE(std::isfinite(n));
    if (prev > 0) {
      EXPECT_LT(n / prev, 10.0);
      EXPECT_GT(n / prev, 0.1);
    }
    prev = n;
  }
  EXPECT_LT(prev, 1.0);
}

TEST(BirmanSchwinger, NeedsDistortedTable) {
  const CoefficientTable table(kSetup, std::nullopt, kSmall);
  EXPECT_THROW(birman_schwinger_norm(table, Complex(9.8, 1.0)), InvalidArgument);
}
