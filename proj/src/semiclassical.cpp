#include "tribaker/semiclassical.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tribaker/linalg.hpp"

namespace tribaker {

ScarMatrices ScarMatrices::leading(int k) const {
  return {a.topLeftCorner(k, k), s.topLeftCorner(k, k)};
}

ScarMatrices assemble_matrices(const ScarBasisSet& basis, const CMatrix& u_tilde) {
  if (basis.size() == 0) throw std::invalid_argument("assemble_matrices: empty basis");
  const CMatrix right = basis.right_matrix();
  const CMatrix left = basis.left_matrix();
  if (u_tilde.rows() != u_tilde.cols() || u_tilde.cols() != right.rows()) {
    throw std::invalid_argument("assemble_matrices: propagator and basis dimensions differ");
  }
  const CMatrix lh = left.adjoint();
  return {lh * (u_tilde * right), lh * right};
}

GeneralizedSpectrum solve_generalized(const CMatrix& a, const CMatrix& s, double svd_tol, bool want_vectors) {
  if (a.rows() != a.cols() || s.rows() != s.cols() || a.rows() != s.rows()) {
    throw std::invalid_argument("solve_generalized: A and S must be square and of equal size");
  }
  if (!(svd_tol > 0.0 && svd_tol < 1.0)) throw std::invalid_argument("solve_generalized: svd_tol must be in (0,1)");
  if (a.rows() == 0) throw NumericalError("solve_generalized: empty problem");

  const linalg::Svd f = linalg::svd(s);
  const double smax = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  Eigen::Index k = 0;
  while (k < f.sigma.size() && smax > 0.0 && f.sigma(k) >= svd_tol * smax) ++k;
  if (k == 0) throw NumericalError("solve_generalized: every singular value of S is below tolerance");

  const Eigen::VectorXd inv_sigma = f.sigma.head(k).cwiseInverse();
  const CMatrix uk = f.u.leftCols(k);
  const CMatrix vk = f.v.leftCols(k);
  const CMatrix reduced = inv_sigma.asDiagonal() * (uk.adjoint() * a * vk);

  const linalg::Eigensystem es = linalg::eig(reduced, want_vectors);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return std::abs(es.values(x)) > std::abs(es.values(y));
  });

  GeneralizedSpectrum out;
  out.rank_used = static_cast<int>(k);
  out.eigenvalues.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) out.eigenvalues(j) = es.values(order[static_cast<std::size_t>(j)]);
  if (want_vectors) {
    const CMatrix right = vk * es.right;
    const CMatrix left = uk * (inv_sigma.asDiagonal() * es.left);
    out.right_coefficients.resize(a.rows(), k);
    out.left_coefficients.resize(a.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
      out.right_coefficients.col(j) = right.col(order[static_cast<std::size_t>(j)]);
      out.left_coefficients.col(j) = left.col(order[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

ReconstructedStates reconstruct_states(const ScarBasisSet& basis, const GeneralizedSpectrum& spectrum) {
  if (!spectrum.has_vectors()) throw std::invalid_argument("reconstruct_states: spectrum solved without vectors");
  if (spectrum.right_coefficients.rows() != basis.size()) {
    throw std::invalid_argument("reconstruct_states: coefficient length differs from basis size");
  }
  ReconstructedStates out;
  out.eigenvalues = spectrum.eigenvalues;
  out.right = basis.right_matrix() * spectrum.right_coefficients;
  out.left = basis.left_matrix() * spectrum.left_coefficients;
  for (Eigen::Index j = 0; j < out.right.cols(); ++j) {
    auto r = out.right.col(j);
    auto l = out.left.col(j);
    r.normalize();
    l.normalize();
    const Complex s = l.dot(r);
    if (std::abs(s) < 1e-12) continue;
    const double mag = std::sqrt(std::abs(s));
    r *= std::conj(s) / (std::abs(s) * mag);
    l /= mag;
  }
  return out;
}

PerformanceReport match_eigenvalues(const ResonanceSet& exact, const CVector& semiclassical, double eps) {
  PerformanceReport rep;
  rep.eps = eps;
  rep.total_longlived = exact.n_longlived;
  std::vector<char> claimed(static_cast<std::size_t>(semiclassical.size()), 0);
  for (int i = 0; i < exact.n_longlived; ++i) {
    const Complex z = exact.eigenvalues(i);
    Eigen::Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < semiclassical.size(); ++j) {
      if (claimed[static_cast<std::size_t>(j)]) continue;
      const double d = std::abs(semiclassical(j) - z);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best < 0) break;
    claimed[static_cast<std::size_t>(best)] = 1;
    if (best_d <= eps) {
      ++rep.matched;
      rep.pairs.push_back({z, semiclassical(best), best_d});
    }
  }
  rep.performance = rep.total_longlived > 0 ? static_cast<double>(rep.matched) / rep.total_longlived : 0.0;
  return rep;
}

MinBasisResult find_min_basis(const ScarMatrices& full, const ResonanceSet& exact, const MinBasisRequest& req) {
  if (!(req.target_p >= 0.0 && req.target_p <= 1.0)) {
    throw std::invalid_argument("find_min_basis: target_p must be in [0,1]");
  }
  if (req.scan_stride < 1) throw std::invalid_argument("find_min_basis: scan_stride must be >= 1");
  const auto size = static_cast<int>(full.a.rows());
  if (size == 0) throw std::invalid_argument("find_min_basis: empty basis");

  MinBasisResult out;
  out.basis_size = size;
  out.report.performance = -1.0;

  auto evaluate = [&](int k) {
    const ScarMatrices sub = full.leading(k);
    const GeneralizedSpectrum gs = solve_generalized(sub.a, sub.s, req.svd_tol, false);
    PerformanceReport rep = match_eigenvalues(exact, gs.eigenvalues, req.eps);
    out.trace.push_back({k, gs.rank_used, rep.performance});
    return rep;
  };
  auto accept = [&](int k, PerformanceReport&& rep) {
    out.reached = true;
    out.n_sf = k;
    out.report = std::move(rep);
    std::sort(out.trace.begin(), out.trace.end(),
              [](const TracePoint& x, const TracePoint& y) { return x.n_sf < y.n_sf; });
  };

  int lo = 1;
  for (int k = std::min(req.scan_stride, size);; k = std::min(k + req.scan_stride, size)) {
    PerformanceReport rep = evaluate(k);
    if (rep.performance >= req.target_p) {
      for (int j = lo; j < k; ++j) {
        PerformanceReport fine = evaluate(j);
        if (fine.performance >= req.target_p) {
          accept(j, std::move(fine));
          return out;
        }
      }
      accept(k, std::move(rep));
      return out;
    }
    if (rep.performance > out.report.performance) out.report = std::move(rep);
    if (k == size) break;
    lo = k + 1;
  }
  out.n_sf = size;
  return out;
}

MinBasisResult find_min_basis(const std::vector<PeriodicOrbit>& selection, const CMatrix& u_tilde,
                              const ResonanceSet& exact, const MinBasisRequest& req, int tau) {
  if (selection.empty()) throw std::invalid_argument("find_min_basis: empty selection");
  const ScarBasisSet basis = build_scar_basis(selection, u_tilde, tau);
  return find_min_basis(assemble_matrices(basis, u_tilde), exact, req);
}

double basis_fraction(const MinBasisResult& r, int n_dim) {
  if (!r.reached || r.n_sf >= n_dim) return 1.0;
  return static_cast<double>(r.n_sf) / n_dim;
}

}  // namespace tribaker
