#pragma once

#include <cstdint>
#include <vector>

#include "tribaker/types.hpp"

namespace tribaker::linalg {

/// Full eigendecomposition of a general complex matrix. Columns of `right`
/// satisfy A r = z r; columns of `left` satisfy l^H A = z l^H. Both are
/// unit-norm as returned by LAPACK zgeev.
struct Eigensystem {
  CVector values;
  CMatrix right;
  CMatrix left;
};

/// Throws NumericalError (with a content hash of `a`) if zgeev fails.
Eigensystem eig(const CMatrix& a, bool want_vectors = true);

/// Eigenvalues only.
CVector eigenvalues(const CMatrix& a);

struct Svd {
  CMatrix u;
  Eigen::VectorXd sigma;  // descending
  CMatrix v;              // a = u * diag(sigma) * v^H
};

Svd svd(const CMatrix& a);

/// FNV-1a over the raw bytes, used to label matrices in diagnostics and
/// cache keys.
std::uint64_t content_hash(const CMatrix& a);

}  // namespace tribaker::linalg
