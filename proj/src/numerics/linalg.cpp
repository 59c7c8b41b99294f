#include "biorth/numerics/linalg.hpp"

#include <string>
#include <utility>

#include "biorth/errors.hpp"

namespace biorth::numerics {

namespace {

void require_square(std::size_t rows, std::size_t cols) {
  if (rows != cols) {
    throw Error(ErrorCode::InvalidArgument,
                "matrix is " + std::to_string(rows) + "x" + std::to_string(cols) + ", expected square");
  }
}

// Bareiss elimination in place; returns the determinant.  Row swaps for
// zero pivots only, since every intermediate entry stays an exact integer.
Integer bareiss(Matrix<Integer> m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  int sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t r = k + 1;
      while (r < n && m(r, k) == 0) ++r;
      if (r == n) return 0;
      m.swap_rows(k, r);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = m(k, k) * m(i, j) - m(i, k) * m(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = std::move(v);
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

}  // namespace

Integer determinant(const Matrix<Integer>& a) {
  require_square(a.rows(), a.cols());
  return bareiss(a);
}

Rational determinant(const Matrix<Rational>& a) {
  require_square(a.rows(), a.cols());
  const std::size_t n = a.rows();
  // Clear denominators row by row, then run integer Bareiss.
  Matrix<Integer> z(n, n);
  Rational scale = 1;
  for (std::size_t i = 0; i < n; ++i) {
    Integer l = 1;
    for (std::size_t j = 0; j < n; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(i, j).get_den_mpz_t());
    for (std::size_t j = 0; j < n; ++j) z(i, j) = a(i, j).get_num() * (l / a(i, j).get_den());
    scale *= l;
  }
  Rational det(bareiss(std::move(z)));
  det /= scale;
  det.canonicalize();
  return det;
}

RationalDetSolve det_and_solve(const Matrix<Rational>& a, const std::vector<Rational>* b) {
  require_square(a.rows(), a.cols());
  RationalDetSolve out{determinant(a), std::nullopt};
  if (out.determinant == 0) throw Error(ErrorCode::SingularMatrix, "exact determinant is zero");
  if (b == nullptr) return out;
  const std::size_t n = a.rows();
  if (b->size() != n) throw Error(ErrorCode::InvalidArgument, "right-hand side size mismatch");

  Matrix<Rational> m = a;
  std::vector<Rational> rhs = *b;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t r = k;
    while (m(r, k) == 0) ++r;  // nonsingular, so a nonzero pivot exists
    if (r != k) {
      m.swap_rows(k, r);
      std::swap(rhs[k], rhs[r]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      const Rational f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      rhs[i] -= f * rhs[k];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t k = n; k-- > 0;) {
    Rational s = rhs[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= m(k, j) * x[j];
    x[k] = s / m(k, k);
    x[k].canonicalize();
  }
  out.solution = std::move(x);
  return out;
}

namespace {

struct FullPivotLU {
  Matrix<Real> lu;
  std::vector<std::size_t> row_perm;
  std::vector<std::size_t> col_perm;
  Real det;
  Real growth;
  bool exact_zero_pivot = false;
};

FullPivotLU factor(const Matrix<Real>& a) {
  const std::size_t n = a.rows();
  FullPivotLU f{a, {}, {}, Real(1), Real(1)};
  f.row_perm.resize(n);
  f.col_perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.row_perm[i] = f.col_perm[i] = i;

  Real amax(0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) amax = max(amax, abs(a(i, j)));
  Real umax = amax;

  Matrix<Real>& m = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = k, pc = k;
    Real best(0);
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j) {
        Real v = abs(m(i, j));
        if (v > best) {
          best = std::move(v);
          pr = i;
          pc = j;
        }
      }
    if (best.is_zero()) {
      f.exact_zero_pivot = true;
      f.det = Real(0);
      return f;
    }
    if (pr != k) {
      m.swap_rows(k, pr);
      std::swap(f.row_perm[k], f.row_perm[pr]);
      f.det = -f.det;
    }
    if (pc != k) {
      m.swap_cols(k, pc);
      std::swap(f.col_perm[k], f.col_perm[pc]);
      f.det = -f.det;
    }
    f.det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      m(i, k) /= m(k, k);
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) -= m(i, k) * m(k, j);
        umax = max(umax, abs(m(i, j)));
      }
    }
  }
  f.growth = amax.is_zero() ? Real(1) : umax / amax;
  return f;
}

}  // namespace

Real determinant(const Matrix<Real>& a, const PrecisionCtx& ctx) {
  require_square(a.rows(), a.cols());
  PrecisionScope scope(ctx.bits());
  return factor(a).det;
}

namespace {

Real min_pivot_ratio(const Matrix<Real>& a, const FullPivotLU& f) {
  Real amax(0), pmin;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) amax = max(amax, abs(a(i, j)));
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const Real p = abs(f.lu(k, k));
    if (k == 0 || p < pmin) pmin = p;
  }
  return amax.is_zero() ? Real(0) : pmin / amax;
}

}  // namespace

PivotedDet pivoted_determinant(const Matrix<Real>& a, const PrecisionCtx& ctx) {
  require_square(a.rows(), a.cols());
  PrecisionScope scope(ctx.bits());
  const FullPivotLU f = factor(a);
  return {f.det, min_pivot_ratio(a, f)};
}

RealDetSolve det_and_solve(const Matrix<Real>& a, const std::vector<Real>* b, const PrecisionCtx& ctx) {
  require_square(a.rows(), a.cols());
  PrecisionScope scope(ctx.bits());
  const std::size_t n = a.rows();

  FullPivotLU f = factor(a);
  if (f.exact_zero_pivot) throw Error(ErrorCode::SingularMatrix, "zero pivot in full-pivot elimination");

  // Rank-revealing test on the smallest pivot.  The Hadamard ratio
  // |det| / prod ||row_i|| multiplies all the small pivots together and
  // flags merely ill-conditioned Hankel-like matrices as singular.
  const Real ratio = min_pivot_ratio(a, f);
  if (ratio <= pow2(16 - ctx.bits())) {
    throw Error(ErrorCode::SingularMatrix, "smallest pivot ratio " + ratio.to_decimal(6) + " is at rounding level");
  }

  RealDetSolve out{f.det, std::nullopt, f.growth, std::nullopt};
  if (b == nullptr) return out;
  if (b->size() != n) throw Error(ErrorCode::InvalidArgument, "right-hand side size mismatch");

  // Forward substitution on the row-permuted rhs, back substitution, unpermute columns.
  std::vector<Real> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    Real s = (*b)[f.row_perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * y[j];
    y[i] = std::move(s);
  }
  for (std::size_t i = n; i-- > 0;) {
    Real s = y[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * y[j];
    y[i] = s / f.lu(i, i);
  }
  std::vector<Real> x(n);
  for (std::size_t i = 0; i < n; ++i) x[f.col_perm[i]] = y[i];

  Real res(0), anorm(0), xnorm(0);
  for (std::size_t i = 0; i < n; ++i) {
    Real s = -(*b)[i];
    Real row(0);
    for (std::size_t j = 0; j < n; ++j) {
      s += a(i, j) * x[j];
      row += abs(a(i, j));
    }
    res = max(res, abs(s));
    anorm = max(anorm, row);
    xnorm = max(xnorm, abs(x[i]));
  }
  if (res > pow2(-ctx.bits() / 2) * anorm * xnorm) {
    throw Error(ErrorCode::SingularMatrix, "solve residual " + res.to_decimal(6) + " exceeds working-precision bound");
  }
  out.solution = std::move(x);
  out.residual = std::move(res);
  return out;
}

Matrix<Rational> inverse(const Matrix<Rational>& a) {
  require_square(a.rows(), a.cols());
  const std::size_t n = a.rows();
  Matrix<Rational> inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<Rational> e(n, Rational(0));
    e[c] = 1;
    auto sol = det_and_solve(a, &e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = (*sol.solution)[r];
  }
  return inv;
}

Matrix<Rational> hilbert(std::size_t n) {
  Matrix<Rational> h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = Rational(1, static_cast<unsigned long>(i + j + 1));
  return h;
}

Matrix<Real> to_real(const Matrix<Rational>& a) {
  return a.map([](const Rational& q) { return Real(q); });
}

}  // namespace biorth::numerics
