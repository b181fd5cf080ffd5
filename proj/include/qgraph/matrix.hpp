#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include "qgraph/errors.hpp"

namespace qgraph {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline double herm_defect(const Matrix& a) {
  return (a - a.adjoint()).norm();
}

inline bool is_hermitian(const Matrix& a, double rel_tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  double scale = a.norm();
  return herm_defect(a) <= rel_tol * std::max(1.0, scale);
}

inline Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

// 2-norm condition number (matrices here are small).
inline double condition_number(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

// Conditioning of inverting `a` inside a larger computation of magnitude
// `scale`: max(scale, sigma_max) / sigma_min.  Unlike the plain condition
// number this detects a uniformly tiny factor (e.g. scalar S(l,z) -> 0 at a
// Dirichlet eigenvalue, where cond(S) = 1).
inline double scaled_condition(const Matrix& a, double scale) {
  Eigen::JacobiSVD<Matrix> svd(a);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(scale, smax) / smin;
}

struct Inertia {
  int negative = 0;
  int zero = 0;
  int positive = 0;
};

// Inertia via LDL* (Bunch-Kaufman).  Every 2x2 pivot block of a Hermitian
// factorization carries one positive and one negative eigenvalue.
inline Inertia inertia_ldlt(const Matrix& h) {
  const int n = static_cast<int>(h.rows());
  Inertia out;
  if (n == 0) return out;
  Matrix a = h;  // column-major, overwritten by zhetrf
  std::vector<lapack_int> ipiv(n);
  lapack_int info = LAPACKE_zhetrf(LAPACK_COL_MAJOR, 'L', n,
                                   reinterpret_cast<lapack_complex_double*>(a.data()),
                                   n, ipiv.data());
  if (info < 0) throw SolverFailure("zhetrf: illegal argument");
  for (int k = 0; k < n;) {
    if (ipiv[k] > 0) {
      double d = a(k, k).real();
      if (d > 0)
        ++out.positive;
      else if (d < 0)
        ++out.negative;
      else
        ++out.zero;
      ++k;
    } else {
      ++out.positive;
      ++out.negative;
      k += 2;
    }
  }
  return out;
}

// Negative / boundary eigenvalue counts of a Hermitian matrix.
// negative_count = #{lambda < -eps*scale}, boundary = #{|lambda| <= eps*scale}
// with scale = max(1, ||H||).  The eigendecomposition result is cross-checked
// against the LDL* inertia whenever no eigenvalue sits near the threshold.
inline std::pair<int, int> kappa_minus_matrix(const Matrix& h,
                                              double eps_inertia = 1e-9) {
  if (h.rows() != h.cols() || !is_hermitian(h, 1e-8))
    throw NotHermitian("kappa_minus_matrix: input not Hermitian");
  const Matrix hs = hermitize(h);
  Eigen::SelfAdjointEigenSolver<Matrix> es(hs, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw SolverFailure("Hermitian eigendecomposition failed");
  const double scale = std::max(1.0, hs.norm());
  const double tol = eps_inertia * scale;
  int neg = 0, boundary = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()(i);
    if (std::abs(lam) <= tol)
      ++boundary;
    else if (lam < 0)
      ++neg;
  }
  if (boundary == 0 && hs.rows() > 0) {
    Inertia fac = inertia_ldlt(hs);
    if (fac.negative != neg)
      throw SolverFailure("inertia cross-check disagreement");
  }
  return {neg, boundary};
}

inline int kappa_minus(const Matrix& h, double eps_inertia = 1e-9) {
  return kappa_minus_matrix(h, eps_inertia).first;
}

// Q_- in the decomposition Q = Q_+ - Q_- with both parts PSD and Q_+ Q_- = 0.
inline Matrix negative_part(const Matrix& q) {
  if (!is_hermitian(q, 1e-8)) throw NotHermitian("negative_part: input not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(q));
  RealVector lam = es.eigenvalues();
  RealVector neg = (-lam).cwiseMax(0.0);
  return es.eigenvectors() * neg.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix positive_part(const Matrix& q) { return negative_part(-q); }

}  // namespace qgraph
