#include "egomwf/gevd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "egomwf/error.hpp"

namespace egomwf {

namespace {

constexpr double kHermitianTol = 1e-10;

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols()) throw Error(std::string(what) + ": matrix is not square");
}

void require_hermitian(const ComplexMatrix& a, const char* what) {
  require_square(a, what);
  const double norm = a.norm();
  if ((a - a.adjoint()).norm() > kHermitianTol * std::max(norm, 1e-300))
    throw Error(std::string(what) + ": matrix is not Hermitian");
}

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace

ComplexMatrix cholesky(const ComplexMatrix& a) {
  require_square(a, "cholesky");
  const Eigen::Index n = a.rows();
  ComplexMatrix l = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0) || !std::isfinite(d)) throw NotPositiveDefinite(static_cast<std::size_t>(j), d);
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cdouble s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

ComplexMatrix solve_lower(const ComplexMatrix& l, const ComplexMatrix& b) {
  const Eigen::Index n = l.rows();
  ComplexMatrix x = b;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      cdouble s = x(i, c);
      for (Eigen::Index k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return x;
}

ComplexMatrix solve_lower_adjoint(const ComplexMatrix& l, const ComplexMatrix& b) {
  // L^H is upper triangular with (L^H)(i,k) = conj(L(k,i)).
  const Eigen::Index n = l.rows();
  ComplexMatrix x = b;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      cdouble s = x(i, c);
      for (Eigen::Index k = i + 1; k < n; ++k) s -= std::conj(l(k, i)) * x(k, c);
      x(i, c) = s / std::conj(l(i, i));
    }
  }
  return x;
}

HermitianEigen hermitian_eig(const ComplexMatrix& input, std::size_t max_sweeps) {
  require_hermitian(input, "hermitian_eig");
  const Eigen::Index n = input.rows();
  ComplexMatrix a = 0.5 * (input + input.adjoint());
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double norm = a.norm();
  const double floor = 1e-18 * norm;
  constexpr double kRelTol = 1e-15;

  std::size_t sweep = 0;
  bool rotated = n > 1;
  while (rotated) {
    if (sweep == max_sweeps) throw ConvergenceError(sweep, off_diagonal_norm(a) / std::max(norm, 1e-300));
    ++sweep;
    rotated = false;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cdouble apq = a(p, q);
        const double mag = std::abs(apq);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (mag <= floor || mag <= kRelTol * std::sqrt(std::abs(app * aqq))) continue;
        rotated = true;

        // Phase-align a_pq to the real axis, then a real Jacobi rotation.
        const cdouble phase = apq / mag;  // e^{i phi}
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // U restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
        const cdouble u_pp = c;
        const cdouble u_pq = s;
        const cdouble u_qp = -s * std::conj(phase);
        const cdouble u_qq = c * std::conj(phase);

        for (Eigen::Index k = 0; k < n; ++k) {  // A <- A U
          const cdouble akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * u_pp + akq * u_qp;
          a(k, q) = akp * u_pq + akq * u_qq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {  // A <- U^H A
          const cdouble apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
          a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (Eigen::Index k = 0; k < n; ++k) {  // V <- V U
          const cdouble vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * u_pp + vkq * u_qp;
          v(k, q) = vkp * u_pq + vkq * u_qq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() > a(j, j).real(); });

  HermitianEigen out{RealVector(n), ComplexMatrix(n, n), sweep};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.values(i) = a(src, src).real();
    auto col = v.col(src);
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double m = std::abs(col(k));
      if (m > best) {
        best = m;
        arg = k;
      }
    }
    const cdouble fix = best > 0.0 ? std::conj(col(arg)) / best : cdouble{1.0};
    out.vectors.col(i) = col * fix;
    out.vectors(arg, i) = best;  // exactly real positive
  }
  return out;
}

PencilDecomposition gevd(const ComplexMatrix& r_yy, const ComplexMatrix& r_nn) {
  require_hermitian(r_yy, "gevd(r_yy)");
  require_hermitian(r_nn, "gevd(r_nn)");
  if (r_yy.rows() != r_nn.rows()) throw Error("gevd: pencil dimensions differ");

  const ComplexMatrix l = cholesky(r_nn);
  const ComplexMatrix x = solve_lower(l, r_yy);                // L^{-1} R_yy
  ComplexMatrix whitened = solve_lower(l, x.adjoint());        // L^{-1} R_yy L^{-H}
  whitened = 0.5 * (whitened + whitened.adjoint());
  const HermitianEigen eig = hermitian_eig(whitened);

  PencilDecomposition d;
  d.q = l * eig.vectors;
  d.q_inv_h = solve_lower_adjoint(l, eig.vectors);
  d.sigma_y = eig.values;
  d.sigma_n = RealVector::Ones(r_yy.rows());
  return d;
}

}  // namespace egomwf
