#include "tribaker/linalg.hpp"

#include <cstring>
#include <sstream>

#include <lapacke.h>

namespace tribaker::linalg {

namespace {

lapack_complex_double* as_lapack(Complex* p) { return reinterpret_cast<lapack_complex_double*>(p); }

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

std::uint64_t content_hash(const CMatrix& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t rows = a.rows();
  const std::int64_t cols = a.cols();
  mix(&rows, sizeof rows);
  mix(&cols, sizeof cols);
  mix(a.data(), sizeof(Complex) * static_cast<std::size_t>(a.size()));
  return h;
}

Eigensystem eig(const CMatrix& a, bool want_vectors) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eig: matrix is not square");
  const auto n = static_cast<lapack_int>(a.rows());
  CMatrix work = a;
  Eigensystem out;
  out.values.resize(n);
  if (want_vectors) {
    out.left.resize(n, n);
    out.right.resize(n, n);
  }
  const char jobv = want_vectors ? 'V' : 'N';
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, jobv, jobv, n, as_lapack(work.data()), n, as_lapack(out.values.data()),
      want_vectors ? as_lapack(out.left.data()) : nullptr, n,
      want_vectors ? as_lapack(out.right.data()) : nullptr, n);
  if (info != 0) {
    throw NumericalError("eig: zgeev failed (info=" + std::to_string(info) + ") for matrix hash " +
                         hex(content_hash(a)));
  }
  return out;
}

CVector eigenvalues(const CMatrix& a) { return eig(a, false).values; }

Svd svd(const CMatrix& a) {
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  CMatrix work = a;
  Svd out;
  out.u.resize(m, k);
  out.sigma.resize(k);
  CMatrix vh(k, n);
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, as_lapack(work.data()), m, out.sigma.data(),
                     as_lapack(out.u.data()), m, as_lapack(vh.data()), k);
  if (info != 0) {
    throw NumericalError("svd: zgesdd failed (info=" + std::to_string(info) + ") for matrix hash " +
                         hex(content_hash(a)));
  }
  out.v = vh.adjoint();
  return out;
}

}  // namespace tribaker::linalg
