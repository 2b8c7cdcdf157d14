#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "tribaker/quantum_map.hpp"
#include "tribaker/scar_basis.hpp"

using namespace tribaker;
using test::alignment;

namespace {

CMatrix propagator(int n, double r) {
  MapSpec s;
  s.n_dim = n;
  s.reflectivity = r;
  return open_propagator(s);
}

PeriodicOrbit orbit(const char* symbols) { return orbit_from_symbols(SymbolSequence::parse(symbols)); }

double quasimode_residual(const ScarFunction& f, const CMatrix& u) {
  const Complex z = std::polar(1.0, kTwoPi * f.bohr_phase);
  return (u * f.right - z * f.right).norm() / f.right.norm();
}

}  // namespace

TEST_CASE("coherent states") {
  const int n = 243;
  const CVector a = coherent_state({0.25, 0.25}, n, 0.5, 0.5);
  CHECK(std::abs(a.norm() - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(a.dot(a)) - 1.0) < 1e-12);

  const CVector far1 = coherent_state({0.2, 0.2}, n, 0.5, 0.5);
  const CVector far2 = coherent_state({0.7, 0.7}, n, 0.5, 0.5);
  CHECK(std::abs(far1.dot(far2)) < std::exp(-std::numbers::pi * n / 8.0));

  // Shifting the center by one lattice step shifts the amplitudes by one
  // index, with the antiperiodic sign on the wrapped entry.
  const double q0 = 0.4;
  const double p0 = 0.3;
  const CVector base = coherent_state({q0, p0}, n, 0.5, 0.5);
  const CVector moved = coherent_state({q0 + 1.0 / n, p0}, n, 0.5, 0.5);
  CVector shifted(n);
  shifted(0) = -base(n - 1);
  shifted.tail(n - 1) = base.head(n - 1);
  CHECK(alignment(shifted, moved) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK((moved - shifted * (shifted.dot(moved))).norm() < 1e-8);

  CHECK_THROWS_AS(coherent_state({0.0, 0.0}, 0, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("orbit combinations") {
  const int n = 243;
  const CVector phi0 = build_phi(orbit("0"), 0, n);
  CHECK(alignment(phi0, coherent_state({0.0, 0.0}, n, 0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-12));

  // Norm before the explicit normalization, from the constituents.
  const PeriodicOrbit o2 = orbit("02");
  const CVector raw = (coherent_state(o2.points[0], n, 0.5, 0.5) + coherent_state(o2.points[1], n, 0.5, 0.5)) /
                      std::sqrt(2.0);
  CHECK(raw.norm() > 0.9);
  CHECK(raw.norm() < 1.1);

  const CVector a = build_phi(o2, 0, n);
  const CVector b = build_phi(o2, 1, n);
  CHECK(std::abs(a.norm() - 1.0) < 1e-12);
  CHECK(std::abs(a.dot(b)) < 0.1);

  CHECK_THROWS_AS(build_phi(o2, 2, n), std::invalid_argument);
  CHECK_THROWS_AS(build_phi(o2, -1, n), std::invalid_argument);
}

TEST_CASE("Ehrenfest time") {
  CHECK(ehrenfest_time(243) == 5);
  CHECK(ehrenfest_time(729) == 6);
  CHECK(ehrenfest_time(3) == 1);
  CHECK(ehrenfest_time(27) == 3);
  CHECK_THROWS_AS(ehrenfest_time(2), std::invalid_argument);
}

TEST_CASE("scar pairs are normalized against each other") {
  for (double r : {0.0, 0.07, 0.2, 1.0}) {
    const CMatrix u = propagator(243, r);
    for (const char* w : {"0", "2", "02", "1", "0022", "0001202", "12"}) {
      const PeriodicOrbit o = orbit(w);
      for (int m = 0; m < o.period(); ++m) {
        const ScarFunction f = scar_pair(o, m, u, 5);
        CAPTURE(w);
        CAPTURE(r);
        CHECK(std::abs(f.left.dot(f.right) - 1.0) < 1e-10);
        CHECK(std::abs(f.right.squaredNorm() - f.left.squaredNorm()) < 1e-10 * f.right.squaredNorm());
        CHECK(f.inside_repeller == o.inside_repeller);
      }
    }
  }
}

TEST_CASE("windowed sums agree with the literal formulas") {
  // Right: sum over t = 0..tau including the zero-weight endpoint.
  // Left: the bra <phi| multiplied on the right by U^t.
  const int n = 81;
  const int tau = 4;
  const CMatrix u = propagator(n, 0.3);
  const PeriodicOrbit o = orbit("0212");
  const int m = 1;
  const CVector phi = build_phi(o, m, n);
  const double a = bohr_phase(o, m, n);

  CVector right = CVector::Zero(n);
  Eigen::RowVectorXcd bra = Eigen::RowVectorXcd::Zero(n);
  CVector ut_phi = phi;
  Eigen::RowVectorXcd phi_ut = phi.adjoint();
  for (int t = 0; t <= tau; ++t) {
    const double w = std::cos(std::numbers::pi * t / (2.0 * tau));
    const Complex ph = std::polar(1.0, -kTwoPi * a * t);
    right += w * ph * ut_phi;
    bra += w * ph * phi_ut;
    ut_phi = u * ut_phi;
    phi_ut = phi_ut * u;
  }
  const ScarFunction f = scar_pair(o, m, u, tau);
  CHECK(alignment(right, f.right) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(alignment(bra.adjoint(), f.left) == doctest::Approx(1.0).epsilon(1e-12));

  // The t = tau summand carries exactly zero weight: tau = 1 returns phi.
  const ScarFunction one = scar_pair(o, m, u, 1);
  CHECK(alignment(one.right, phi) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(alignment(one.left, phi) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("m and m + L give the same scar function") {
  const int n = 243;
  const CMatrix u = propagator(n, 0.2);
  const PeriodicOrbit o = orbit("0122");
  PeriodicOrbit shifted = o;
  // Raising the total action by L/N raises A by exactly one.
  shifted.total_action += static_cast<double>(o.period()) / n;
  for (int m = 0; m < o.period(); ++m) {
    CHECK(bohr_phase(shifted, m, n) == doctest::Approx(bohr_phase(o, m, n) + 1.0).epsilon(1e-13));
    const ScarFunction a = scar_pair(o, m, u, 5);
    const ScarFunction b = scar_pair(shifted, m, u, 5);
    CHECK((a.right - b.right).norm() < 1e-10);
    CHECK((a.left - b.left).norm() < 1e-10);
  }
}

TEST_CASE("vanishing reflectivity is continuous") {
  const CMatrix u0 = propagator(243, 0.0);
  const CMatrix u1 = propagator(243, 1e-12);
  for (const char* w : {"02", "0001", "1"}) {
    const PeriodicOrbit o = orbit(w);
    const ScarFunction a = scar_pair(o, 0, u0, 5);
    const ScarFunction b = scar_pair(o, 0, u1, 5);
    CHECK((a.right - b.right).norm() < 1e-6);
    CHECK((a.left - b.left).norm() < 1e-6);
  }
}

TEST_CASE("quasimode residual shrinks with N") {
  const PeriodicOrbit o = orbit("0");
  const CMatrix u27 = propagator(27, 1.0);
  const CMatrix u243 = propagator(243, 1.0);
  const double r27 = quasimode_residual(scar_pair(o, 0, u27, ehrenfest_time(27)), u27);
  const double r243 = quasimode_residual(scar_pair(o, 0, u243, ehrenfest_time(243)), u243);
  CHECK(r243 < r27);
  // Frozen regression values.
  CHECK(r27 == doctest::Approx(0.9012318729).epsilon(1e-6));
  CHECK(r243 == doctest::Approx(0.7140069824).epsilon(1e-6));
}

TEST_CASE("action convention is fixed by the quasimode residual") {
  // The shipped step action (e*q, charged on arrival) against two
  // alternatives, averaged over every function of the period <= 4 repeller
  // orbits at N = 243, R = 1.
  const int n = 243;
  const CMatrix u = propagator(n, 1.0);
  auto mean_residual = [&](auto&& tweak) {
    double sum = 0.0;
    int count = 0;
    for (const auto& base : enumerate_orbits(4)) {
      if (!base.inside_repeller) continue;
      PeriodicOrbit o = base;
      tweak(o);
      for (int m = 0; m < o.period(); ++m) {
        sum += quasimode_residual(scar_pair(o, m, u, 5), u);
        ++count;
      }
    }
    return sum / count;
  };
  const double shipped = mean_residual([](PeriodicOrbit&) {});
  // Generating function W itself as the step action.
  const double generating = mean_residual([](PeriodicOrbit& o) {
    const int l = o.period();
    o.total_action = 0.0;
    for (int j = 0; j < l; ++j) {
      const auto from = static_cast<std::size_t>((j + l - 1) % l);
      const PhasePoint x = o.points[from];
      const double pn = o.points[static_cast<std::size_t>(j)].p;
      const int e = o.symbols[static_cast<int>(from)];
      o.step_actions[static_cast<std::size_t>(j)] = 3.0 * x.q * pn - e * (x.q + pn);
      o.total_action += o.step_actions[static_cast<std::size_t>(j)];
    }
  });
  // Shipped actions but charged at departure.
  const double departure = mean_residual([](PeriodicOrbit& o) {
    std::rotate(o.step_actions.begin(), o.step_actions.begin() + 1, o.step_actions.end());
  });
  CHECK(shipped < generating);
  CHECK(shipped < departure);
}

TEST_CASE("parallel and serial basis construction agree exactly") {
  const CMatrix u = propagator(81, 0.07);
  std::vector<PeriodicOrbit> orbits;
  for (const auto& o : enumerate_orbits(5)) {
    if (o.inside_repeller || o.symbols.count(1) == 1) orbits.push_back(o);
  }
  const ScarBasisSet par = build_scar_basis(orbits, u, 4);
  const ScarBasisSet ser = build_scar_basis_serial(orbits, u, 4);
  REQUIRE(par.size() == ser.size());
  CHECK(par.right_matrix() == ser.right_matrix());
  CHECK(par.left_matrix() == ser.left_matrix());
  int expected = 0;
  for (const auto& o : orbits) expected += o.period();
  CHECK(par.size() + static_cast<int>(par.excluded.size()) == expected);

  // Selection order, ascending m within each orbit.
  std::size_t k = 0;
  for (const auto& o : orbits) {
    for (int m = 0; m < o.period(); ++m, ++k) {
      CHECK(par.functions[k].orbit == o.symbols);
      CHECK(par.functions[k].m == m);
    }
  }
  CHECK(par.prefix(10).size() == 10);
  CHECK(par.prefix(10).right_matrix() == par.right_matrix().leftCols(10));
}
