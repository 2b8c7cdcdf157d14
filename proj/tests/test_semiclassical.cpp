#include <doctest.h>

#include <algorithm>
#include <random>

#include "test_util.hpp"
#include "tribaker/linalg.hpp"
#include "tribaker/quantum_map.hpp"
#include "tribaker/semiclassical.hpp"

using namespace tribaker;
using test::identity_error;

namespace {

CMatrix propagator(int n, double r) {
  MapSpec s;
  s.n_dim = n;
  s.reflectivity = r;
  return open_propagator(s);
}

std::vector<PeriodicOrbit> selection(double r, int n_max_out) {
  SelectionRequest req;
  req.n_max_out = n_max_out;
  req.reflectivity = r;
  return select_orbits(enumerate_orbits(7), req).ordered_orbits;
}

ResonanceSet fake_exact(const CVector& z, int n_c) {
  ResonanceSet set;
  set.eigenvalues = z;
  set.n_longlived = n_c;
  return set;
}

CVector random_spectrum(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  CVector z(n);
  for (int i = 0; i < n; ++i) z(i) = Complex(u(rng), u(rng));
  std::sort(z.data(), z.data() + n, [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
  return z;
}

}  // namespace

TEST_CASE("performance matching") {
  const CVector z = random_spectrum(80, 1);
  const ResonanceSet exact = fake_exact(z, 60);

  CHECK(match_eigenvalues(exact, z.head(60), 1e-3).performance == 1.0);

  const CVector shifted = (z.array() + 0.002).matrix();
  CHECK(match_eigenvalues(exact, shifted, 1e-3).performance == 0.0);

  // Dropping the last long-lived value leaves nothing for its exact partner
  // to claim. Dropping an earlier one would let that partner take a
  // neighbour's value under the greedy rule.
  const CVector missing = z.head(59);
  const PerformanceReport rep = match_eigenvalues(exact, missing, 1e-3);
  CHECK(rep.matched == 59);
  CHECK(rep.performance == doctest::Approx(59.0 / 60.0));
  for (const auto& p : rep.pairs) CHECK(p.distance <= 1e-3);

  // Permuting the semiclassical list does not change P.
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    CVector noisy = z;
    std::normal_distribution<double> g(0.0, 6e-4);
    for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy(i) += Complex(g(rng), g(rng));
    CVector perm = noisy;
    std::shuffle(perm.data(), perm.data() + perm.size(), rng);
    CHECK(match_eigenvalues(exact, noisy, 1e-3).performance == match_eigenvalues(exact, perm, 1e-3).performance);
  }
}

TEST_CASE("matching is one-to-one") {
  CVector z(2);
  z << Complex(0.5, 0.0), Complex(0.5, 1e-4);
  CVector sc(1);
  sc << Complex(0.5, 0.5e-4);
  const PerformanceReport rep = match_eigenvalues(fake_exact(z, 2), sc, 1e-3);
  CHECK(rep.matched == 1);
  CHECK(rep.performance == 0.5);
}

TEST_CASE("generalized solver on synthetic problems") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  const int n = 12;
  CMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  }

  // Identity overlap: the ordinary eigenproblem.
  const GeneralizedSpectrum gs = solve_generalized(a, CMatrix::Identity(n, n), 1e-8, true);
  CHECK(gs.rank_used == n);
  CVector direct = linalg::eigenvalues(a);
  std::sort(direct.data(), direct.data() + n, [](Complex x, Complex y) { return std::abs(x) > std::abs(y); });
  CHECK((gs.eigenvalues - direct).cwiseAbs().maxCoeff() < 1e-10);
  for (int j = 0; j < n; ++j) {
    const CVector c = gs.right_coefficients.col(j);
    CHECK((a * c - gs.eigenvalues(j) * c).norm() < 1e-9 * c.norm());
  }

  CHECK_THROWS_AS(solve_generalized(a, CMatrix::Zero(n, n)), NumericalError);
  CHECK_THROWS_AS(solve_generalized(a, CMatrix::Identity(n + 1, n + 1)), std::invalid_argument);
  CHECK_THROWS_AS(solve_generalized(a, CMatrix::Identity(n, n), 0.0), std::invalid_argument);
}

TEST_CASE("a duplicated scar function is removed by the rank truncation") {
  const CMatrix u = propagator(243, 0.07);
  const auto orbits = selection(0.07, 0);
  ScarBasisSet basis = build_scar_basis({orbits.begin(), orbits.begin() + 6}, u, 5);
  ScarBasisSet dup = basis;
  dup.functions.insert(dup.functions.begin() + 3, basis.functions[2]);

  const ScarMatrices m0 = assemble_matrices(basis, u);
  const ScarMatrices m1 = assemble_matrices(dup, u);
  const GeneralizedSpectrum g0 = solve_generalized(m0.a, m0.s);
  const GeneralizedSpectrum g1 = solve_generalized(m1.a, m1.s);
  CHECK(g1.rank_used == dup.size() - 1);
  CHECK(g0.rank_used == basis.size());
  REQUIRE(g0.eigenvalues.size() == g1.eigenvalues.size());
  CHECK((g0.eigenvalues - g1.eigenvalues).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("scar-basis matrices") {
  const CMatrix u = propagator(243, 0.07);
  const ScarBasisSet basis = build_scar_basis(selection(0.07, 0), u, 5);
  const ScarMatrices m = assemble_matrices(basis, u);
  CHECK(m.a.rows() == basis.size());
  CHECK((m.s.diagonal().array() - 1.0).abs().maxCoeff() < 1e-10);

  const double unorm = linalg::svd(u).sigma(0);
  CHECK(std::abs(m.leading(1).a(0, 0)) <= unorm + 1e-12);

  CHECK_THROWS_AS(assemble_matrices(ScarBasisSet{}, u), std::invalid_argument);
  CHECK_THROWS_AS(assemble_matrices(basis, propagator(81, 0.07)), std::invalid_argument);
}

TEST_CASE("an overcomplete scar basis reproduces the exact long-lived spectrum") {
  for (double r : {0.07, 0.2}) {
    const CMatrix u = propagator(243, r);
    const ResonanceSet exact = exact_resonances(u, 60);
    const ScarBasisSet basis = build_scar_basis(selection(r, 50), u, 5);
    REQUIRE(basis.size() >= 243);
    const ScarMatrices m = assemble_matrices(basis, u);
    const GeneralizedSpectrum gs = solve_generalized(m.a, m.s);
    CAPTURE(r);
    CHECK(gs.rank_used >= 242);
    const PerformanceReport rep = match_eigenvalues(exact, gs.eigenvalues, 1e-6);
    CHECK(rep.matched == 60);
  }
}

TEST_CASE("repeller-only basis at R = 0.07") {
  const CMatrix u = propagator(243, 0.07);
  const ResonanceSet exact = exact_resonances(u, 60);
  const ScarBasisSet basis = build_scar_basis(selection(0.07, 0), u, 5);
  CHECK(basis.size() == 232);
  const ScarMatrices m = assemble_matrices(basis, u);
  const GeneralizedSpectrum gs = solve_generalized(m.a, m.s, kDefaultSvdTol, true);
  const PerformanceReport rep = match_eigenvalues(exact, gs.eigenvalues, 1e-3);
  CHECK(rep.performance >= 0.8);
  CHECK(rep.matched == 58);

  // Reconstructed states are normalized pairs and approximate eigenvectors.
  const ReconstructedStates st = reconstruct_states(basis, gs);
  CHECK(st.right.cols() == gs.rank_used);
  for (int j = 0; j < 10; ++j) {
    CHECK(std::abs(st.left.col(j).dot(st.right.col(j)) - 1.0) < 1e-10);
    CHECK(std::abs(st.left.col(j).norm() - st.right.col(j).norm()) < 1e-10);
    const CVector r = st.right.col(j);
    CHECK((u * r - st.eigenvalues(j) * r).norm() / r.norm() < 0.05);
  }

  // Halving the truncation tolerance moves P by less than one resonance.
  const PerformanceReport half =
      match_eigenvalues(exact, solve_generalized(m.a, m.s, 0.5 * kDefaultSvdTol).eigenvalues, 1e-3);
  CHECK(std::abs(half.performance - rep.performance) < 1.0 / 60.0);

  CHECK_THROWS_AS(reconstruct_states(basis, solve_generalized(m.a, m.s)), std::invalid_argument);
  CHECK_THROWS_AS(reconstruct_states(basis.prefix(10), gs), std::invalid_argument);
}

TEST_CASE("minimal basis search") {
  const CMatrix u = propagator(243, 1e-9);
  const ResonanceSet exact = exact_resonances(u, 60);
  const auto orbits = selection(1e-9, 0);

  MinBasisRequest req;
  const MinBasisResult res = find_min_basis(orbits, u, exact, req, 5);
  CHECK(res.reached);
  CHECK(res.n_sf < 243);
  CHECK(res.n_sf == 142);
  CHECK(res.report.performance >= 0.8);
  CHECK(basis_fraction(res, 243) == doctest::Approx(res.n_sf / 243.0));
  REQUIRE(res.trace.size() == static_cast<std::size_t>(res.n_sf));
  for (std::size_t i = 0; i + 1 < res.trace.size(); ++i) CHECK(res.trace[i].performance < 0.8);
  CHECK(res.trace.back().performance >= 0.8);

  // A coarse stride that lands on the same first crossing.
  const ScarMatrices m = assemble_matrices(build_scar_basis(orbits, u, 5), u);
  MinBasisRequest coarse = req;
  coarse.scan_stride = 10;
  const MinBasisResult c = find_min_basis(m, exact, coarse);
  CHECK(c.n_sf == res.n_sf);

  MinBasisRequest zero = req;
  zero.target_p = 0.0;
  CHECK(find_min_basis(m, exact, zero).n_sf == 1);

  MinBasisRequest impossible = req;
  impossible.target_p = 1.0;
  impossible.eps = 1e-12;
  const MinBasisResult none = find_min_basis(m.leading(20), exact, impossible);
  CHECK_FALSE(none.reached);
  CHECK(none.n_sf == 20);
  CHECK(basis_fraction(none, 243) == 1.0);

  MinBasisRequest bad = req;
  bad.target_p = 1.5;
  CHECK_THROWS_AS(find_min_basis(m, exact, bad), std::invalid_argument);
  CHECK_THROWS_AS(find_min_basis(std::vector<PeriodicOrbit>{}, u, exact, req, 5), std::invalid_argument);
}
