#include "tribaker/quantum_map.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "tribaker/linalg.hpp"

namespace tribaker {

CMatrix dft_matrix(int n, double chi_q, double chi_p) {
  if (n < 1) throw std::invalid_argument("dft_matrix: n must be >= 1");
  CMatrix g(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      // Reduce the phase modulo n before scaling to keep it small for large n.
      const double num = std::fmod((j + chi_q) * (k + chi_p), static_cast<double>(n));
      g(k, j) = std::polar(scale, -kTwoPi * num / n);
    }
  }
  return g;
}

CMatrix baker_propagator(const MapSpec& spec) {
  spec.validate();
  const int n = spec.n_dim;
  const int third = n / 3;
  const CMatrix block = dft_matrix(third, spec.chi_q, spec.chi_p);
  CMatrix diag = CMatrix::Zero(n, n);
  for (int b = 0; b < 3; ++b) diag.block(b * third, b * third, third, third) = block;
  // G_N is unitary, so its inverse is the adjoint.
  return dft_matrix(n, spec.chi_q, spec.chi_p).adjoint() * diag;
}

CVector partial_projector_diagonal(const MapSpec& spec) {
  spec.validate();
  const int third = spec.n_dim / 3;
  CVector d = CVector::Ones(spec.n_dim);
  d.segment(third, third).setConstant(std::sqrt(spec.reflectivity));
  return d;
}

CMatrix partial_projector(const MapSpec& spec) {
  return partial_projector_diagonal(spec).asDiagonal();
}

CMatrix open_propagator(const MapSpec& spec) {
  const CVector d = partial_projector_diagonal(spec);
  return d.asDiagonal() * baker_propagator(spec) * d.asDiagonal();
}

namespace {

std::vector<int> find_clusters(const CVector& z, double radius) {
  const auto n = static_cast<int>(z.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&parent](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(z(i) - z(j)) < radius) parent[static_cast<std::size_t>(root(j))] = root(i);
    }
  }
  std::vector<int> label(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) label[static_cast<std::size_t>(i)] = root(i);
  return label;
}

}  // namespace

ResonanceSet exact_resonances(const CMatrix& u_tilde, int n_c) {
  if (u_tilde.rows() != u_tilde.cols()) throw std::invalid_argument("exact_resonances: matrix is not square");
  const auto n = static_cast<int>(u_tilde.rows());
  if (n_c < 1 || n_c > n) throw std::invalid_argument("exact_resonances: n_c must be in [1, N]");

  const linalg::Eigensystem es = linalg::eig(u_tilde);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(es.values(a)) > std::abs(es.values(b)); });

  ResonanceSet out;
  out.eigenvalues.resize(n);
  out.right.resize(n, n);
  out.left.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const int src = order[static_cast<std::size_t>(j)];
    out.eigenvalues(j) = es.values(src);
    out.right.col(j) = es.right.col(src);
    out.left.col(j) = es.left.col(src);
  }

  std::vector<char> defective(static_cast<std::size_t>(n), 0);

  // Within a degenerate cluster zgeev's left and right bases need not be
  // mutually biorthogonal; fix that with L <- L M^{-H}, M = L^H R.
  const std::vector<int> label = find_clusters(out.eigenvalues, kDegeneracyRadius);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    if (done[static_cast<std::size_t>(i)]) continue;
    std::vector<int> members;
    for (int j = i; j < n; ++j) {
      if (label[static_cast<std::size_t>(j)] == label[static_cast<std::size_t>(i)]) members.push_back(j);
    }
    for (int m : members) done[static_cast<std::size_t>(m)] = 1;
    if (members.size() < 2) continue;
    const auto k = static_cast<Eigen::Index>(members.size());
    CMatrix rc(n, k);
    CMatrix lc(n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
      rc.col(c) = out.right.col(members[static_cast<std::size_t>(c)]);
      lc.col(c) = out.left.col(members[static_cast<std::size_t>(c)]);
    }
    const CMatrix overlap = lc.adjoint() * rc;
    Eigen::JacobiSVD<CMatrix> sv(overlap);
    const double smax = sv.singularValues()(0);
    const double smin = sv.singularValues()(k - 1);
    if (!(smax > 0.0) || smin < kDefectiveOverlap * smax) {
      for (int m : members) defective[static_cast<std::size_t>(m)] = 1;
      continue;
    }
    lc = lc * overlap.inverse().adjoint();
    for (Eigen::Index c = 0; c < k; ++c) out.left.col(members[static_cast<std::size_t>(c)]) = lc.col(c);
  }

  for (int j = 0; j < n; ++j) {
    auto r = out.right.col(j);
    auto l = out.left.col(j);
    r.normalize();
    l.normalize();
    const Complex s = l.dot(r);  // Eigen's dot conjugates the first argument
    if (std::abs(s) < kDefectiveOverlap) defective[static_cast<std::size_t>(j)] = 1;
    if (defective[static_cast<std::size_t>(j)]) continue;
    const double mag = std::sqrt(std::abs(s));
    r *= std::conj(s) / (std::abs(s) * mag);
    l /= mag;
  }
  for (int j = 0; j < n; ++j) {
    if (defective[static_cast<std::size_t>(j)]) out.defective.push_back(j);
  }

  out.n_longlived = n_c;
  const double above = std::abs(out.eigenvalues(n_c - 1));
  const double below = n_c < n ? std::abs(out.eigenvalues(n_c)) : 0.0;
  out.cutoff = 0.5 * (above + below);
  return out;
}

}  // namespace tribaker
