#include "tribaker/scar_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace tribaker {

namespace {

double frac(double x) noexcept { return x - std::floor(x); }

// cos(pi t / 2 tau) with the endpoint pinned to zero.
double window(int t, int tau) noexcept {
  if (t >= tau) return 0.0;
  return std::cos(std::numbers::pi * t / (2.0 * tau));
}

std::pair<CVector, CVector> windowed_sums(const CVector& phi, const CMatrix& u, double bohr, int tau) {
  CVector right = CVector::Zero(phi.size());
  CVector left = CVector::Zero(phi.size());
  CVector forward = phi;
  CVector adjoint = phi;
  for (int t = 0; t < tau; ++t) {
    const double w = window(t, tau);
    const Complex phase = std::polar(1.0, -kTwoPi * frac(bohr * t));
    right += (w * phase) * forward;
    left += (w * std::conj(phase)) * adjoint;
    if (t + 1 < tau) {
      forward = u * forward;
      adjoint = u.adjoint() * adjoint;
    }
  }
  return {std::move(right), std::move(left)};
}

}  // namespace

CVector coherent_state(PhasePoint center, int n, double chi_q, double chi_p) {
  if (n < 1) throw std::invalid_argument("coherent_state: n must be >= 1");
  CVector c(n);
  const double dn = n;
  for (int j = 0; j < n; ++j) {
    const double q = (j + chi_q) / dn;
    Complex sum = 0.0;
    for (int v = -1; v <= 1; ++v) {
      const double d = q - center.q + v;
      const double phase = frac(dn * center.p * d - chi_p * v);
      sum += std::polar(std::exp(-std::numbers::pi * dn * d * d), kTwoPi * phase);
    }
    c(j) = sum;
  }
  c.normalize();
  return c;
}

double bohr_phase(const PeriodicOrbit& orbit, int m, int n) {
  return (n * orbit.total_action + m) / orbit.period();
}

CVector build_phi(const PeriodicOrbit& orbit, int m, int n, double chi_q, double chi_p) {
  const int period = orbit.period();
  if (m < 0 || m >= period) throw std::invalid_argument("build_phi: m must be in [0, L)");
  const double a = bohr_phase(orbit, m, n);
  CVector phi = CVector::Zero(n);
  double theta = 0.0;
  for (int j = 0; j < period; ++j) {
    theta += orbit.step_actions[static_cast<std::size_t>(j)];
    const double phase = -frac(j * a - n * theta);
    phi += std::polar(1.0, kTwoPi * phase) *
           coherent_state(orbit.points[static_cast<std::size_t>(j)], n, chi_q, chi_p);
  }
  phi /= std::sqrt(static_cast<double>(period));
  phi.normalize();
  return phi;
}

int ehrenfest_time(int n) {
  if (n < 3) throw std::invalid_argument("ehrenfest_time: n must be >= 3");
  return static_cast<int>(std::lround(std::log(static_cast<double>(n)) / MapSpec::kLyapunov));
}

ScarFunction scar_pair(const PeriodicOrbit& orbit, int m, const CMatrix& u_tilde, int tau,
                       double chi_q, double chi_p) {
  if (tau < 1) throw std::invalid_argument("scar_pair: tau must be >= 1");
  if (u_tilde.rows() != u_tilde.cols()) throw std::invalid_argument("scar_pair: propagator is not square");
  const auto n = static_cast<int>(u_tilde.rows());

  ScarFunction sf;
  sf.orbit = orbit.symbols;
  sf.inside_repeller = orbit.inside_repeller;
  sf.m = m;
  sf.bohr_phase = bohr_phase(orbit, m, n);
  sf.ehrenfest = tau;

  const CVector phi = build_phi(orbit, m, n, chi_q, chi_p);
  auto [right, left] = windowed_sums(phi, u_tilde, sf.bohr_phase, tau);
  right.normalize();
  left.normalize();
  const Complex s = left.dot(right);
  if (std::abs(s) < 1e-12) {
    throw DegenerateScarError("scar_pair: <L|R> vanishes for orbit " + orbit.symbols.str() +
                              " m=" + std::to_string(m));
  }
  const double mag = std::sqrt(std::abs(s));
  sf.right = right * (std::conj(s) / (std::abs(s) * mag));
  sf.left = left / mag;
  return sf;
}

CMatrix ScarBasisSet::right_matrix() const {
  if (functions.empty()) return {};
  CMatrix m(functions.front().right.size(), size());
  for (int i = 0; i < size(); ++i) m.col(i) = functions[static_cast<std::size_t>(i)].right;
  return m;
}

CMatrix ScarBasisSet::left_matrix() const {
  if (functions.empty()) return {};
  CMatrix m(functions.front().left.size(), size());
  for (int i = 0; i < size(); ++i) m.col(i) = functions[static_cast<std::size_t>(i)].left;
  return m;
}

ScarBasisSet ScarBasisSet::prefix(int count) const {
  ScarBasisSet out;
  out.excluded = excluded;
  const auto k = static_cast<std::size_t>(std::clamp(count, 0, size()));
  out.functions.assign(functions.begin(), functions.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

namespace {

struct PairJob {
  std::size_t orbit;
  int m;
};

std::vector<PairJob> pair_jobs(const std::vector<PeriodicOrbit>& orbits) {
  std::vector<PairJob> jobs;
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    for (int m = 0; m < orbits[o].period(); ++m) jobs.push_back({o, m});
  }
  return jobs;
}

ScarBasisSet collect(const std::vector<PeriodicOrbit>& orbits, const std::vector<PairJob>& jobs,
                     std::vector<ScarFunction>& built, const std::vector<char>& failed) {
  ScarBasisSet set;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (failed[i]) {
      set.excluded.push_back(orbits[jobs[i].orbit].symbols.str() + "/" + std::to_string(jobs[i].m));
    } else {
      set.functions.push_back(std::move(built[i]));
    }
  }
  return set;
}

}  // namespace

ScarBasisSet build_scar_basis_serial(const std::vector<PeriodicOrbit>& orbits,
                                     const CMatrix& u_tilde, int tau) {
  const auto jobs = pair_jobs(orbits);
  std::vector<ScarFunction> built(jobs.size());
  std::vector<char> failed(jobs.size(), 0);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      built[i] = scar_pair(orbits[jobs[i].orbit], jobs[i].m, u_tilde, tau);
    } catch (const DegenerateScarError&) {
      failed[i] = 1;
    }
  }
  return collect(orbits, jobs, built, failed);
}

ScarBasisSet build_scar_basis(const std::vector<PeriodicOrbit>& orbits, const CMatrix& u_tilde,
                              int tau) {
  const auto jobs = pair_jobs(orbits);
  std::vector<ScarFunction> built(jobs.size());
  std::vector<char> failed(jobs.size(), 0);
  const auto count = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    try {
      built[ui] = scar_pair(orbits[jobs[ui].orbit], jobs[ui].m, u_tilde, tau);
    } catch (const DegenerateScarError&) {
      failed[ui] = 1;
    }
  }
  return collect(orbits, jobs, built, failed);
}

}  // namespace tribaker
