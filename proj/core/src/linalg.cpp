// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "kchain/linalg.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace kchain {

namespace {

unsigned capped_valuation(const mpz_class& v, unsigned p, unsigned cap) {
  if (cap == 0) return 0;
  if (v == 0) return cap;
  if (p == 2) {
    const mp_bitcnt_t s = mpz_scan1(v.get_mpz_t(), 0);
    return static_cast<unsigned>(std::min<mp_bitcnt_t>(s, cap));
  }
  return vp(v, p, cap);
}

void check_same_ring(const PadicMatrix& a, const PadicMatrix& b) {
  if (a.p() != b.p() || a.W() != b.W()) raise(ErrorCode::BasisMismatch, "matrices over different coefficient rings");
}

}  // namespace

PadicMatrix::PadicMatrix(unsigned p, unsigned W, std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), p_(p), W_(W), entries_(rows * cols, 0) {
  mpz_ui_pow_ui(modulus_.get_mpz_t(), p, W);
  ledger.valid = W;
}

PadicMatrix PadicMatrix::identity(unsigned p, unsigned W, std::size_t n) {
  PadicMatrix m(p, W, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

void PadicMatrix::normalize() {
  for (auto& v : entries_) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), modulus_.get_mpz_t());
}

unsigned PadicMatrix::valuation(std::size_t r, std::size_t c) const {
  return capped_valuation(at(r, c), p_, ledger.valid);
}

bool PadicMatrix::is_zero_mod_valid() const {
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (valuation(r, c) < ledger.valid) return false;
  return true;
}

PadicMatrix PadicMatrix::transpose() const {
  PadicMatrix t(p_, W_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
  t.ledger = ledger;
  return t;
}

PadicMatrix PadicMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) raise(ErrorCode::InvalidArgument, "block out of range");
  PadicMatrix b(p_, W_, nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) b.at(r, c) = at(r0 + r, c0 + c);
  b.ledger = ledger;
  return b;
}

PadicMatrix operator*(const PadicMatrix& a, const PadicMatrix& b) {
  check_same_ring(a, b);
  if (a.cols() != b.rows()) raise(ErrorCode::BasisMismatch, "matrix product dimension mismatch");
  PadicMatrix out(a.p(), a.W(), a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const mpz_class& x = a.at(r, k);
      if (x == 0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) {
        const mpz_class& y = b.at(k, c);
        if (y != 0) mpz_addmul(out.at(r, c).get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
      }
    }
  }
  out.normalize();
  out.ledger.valid = std::min(a.ledger.valid, b.ledger.valid);
  return out;
}

PadicMatrix operator+(const PadicMatrix& a, const PadicMatrix& b) {
  check_same_ring(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) raise(ErrorCode::BasisMismatch, "matrix sum dimension mismatch");
  PadicMatrix out(a.p(), a.W(), a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out.at(r, c) = a.at(r, c) + b.at(r, c);
  out.normalize();
  out.ledger.valid = std::min(a.ledger.valid, b.ledger.valid);
  return out;
}

PadicMatrix operator-(const PadicMatrix& a) {
  PadicMatrix out(a.p(), a.W(), a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out.at(r, c) = -a.at(r, c);
  out.normalize();
  out.ledger = a.ledger;
  return out;
}

PadicMatrix operator-(const PadicMatrix& a, const PadicMatrix& b) { return a + (-b); }

PadicMatrix vstack(const PadicMatrix& top, const PadicMatrix& bottom) {
  check_same_ring(top, bottom);
  if (top.cols() != bottom.cols()) raise(ErrorCode::BasisMismatch, "vstack column mismatch");
  PadicMatrix out(top.p(), top.W(), top.rows() + bottom.rows(), top.cols());
  for (std::size_t r = 0; r < top.rows(); ++r)
    for (std::size_t c = 0; c < top.cols(); ++c) out.at(r, c) = top.at(r, c);
  for (std::size_t r = 0; r < bottom.rows(); ++r)
    for (std::size_t c = 0; c < top.cols(); ++c) out.at(top.rows() + r, c) = bottom.at(r, c);
  out.ledger.valid = std::min(top.ledger.valid, bottom.ledger.valid);
  return out;
}

PadicMatrix hstack(const PadicMatrix& left, const PadicMatrix& right) {
  check_same_ring(left, right);
  if (left.rows() != right.rows()) raise(ErrorCode::BasisMismatch, "hstack row mismatch");
  PadicMatrix out(left.p(), left.W(), left.rows(), left.cols() + right.cols());
  for (std::size_t r = 0; r < left.rows(); ++r) {
    for (std::size_t c = 0; c < left.cols(); ++c) out.at(r, c) = left.at(r, c);
    for (std::size_t c = 0; c < right.cols(); ++c) out.at(r, left.cols() + c) = right.at(r, c);
  }
  out.ledger.valid = std::min(left.ledger.valid, right.ledger.valid);
  return out;
}

SNFResult smith(const PadicMatrix& m, bool transforms) {
  const unsigned p = m.p();
  const std::size_t R = m.rows(), C = m.cols();
  const mpz_class& mod = m.modulus();
  SNFResult res;
  res.valid = m.ledger.valid;
  PadicMatrix A = m;
  A.normalize();
  if (transforms) {
    res.U = PadicMatrix::identity(p, m.W(), R);
    res.V = PadicMatrix::identity(p, m.W(), C);
  }
  const unsigned valid = res.valid;
  const std::size_t steps = std::min(R, C);
  mpz_class pv, unit, inv, factor;

  std::size_t t = 0;
  for (; t < steps; ++t) {
    unsigned best = valid;
    std::size_t br = 0, bc = 0;
    for (std::size_t r = t; r < R && best > 0; ++r) {
      for (std::size_t c = t; c < C; ++c) {
        const unsigned v = capped_valuation(A.at(r, c), p, valid);
        if (v < best) {
          best = v;
          br = r;
          bc = c;
          if (v == 0) break;
        }
      }
    }
    if (best >= valid) break;
    if (br != t) {
      for (std::size_t c = 0; c < C; ++c) std::swap(A.at(t, c), A.at(br, c));
      if (transforms)
        for (std::size_t c = 0; c < R; ++c) std::swap(res.U.at(t, c), res.U.at(br, c));
    }
    if (bc != t) {
      for (std::size_t r = 0; r < R; ++r) std::swap(A.at(r, t), A.at(r, bc));
      if (transforms)
        for (std::size_t r = 0; r < C; ++r) std::swap(res.V.at(r, t), res.V.at(r, bc));
    }
    mpz_ui_pow_ui(pv.get_mpz_t(), p, best);
    mpz_divexact(unit.get_mpz_t(), A.at(t, t).get_mpz_t(), pv.get_mpz_t());
    if (mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), mod.get_mpz_t()) == 0)
      raise(ErrorCode::NotAUnit, "pivot unit is not invertible");
    // Normalize the pivot row so the pivot becomes p^best.
    for (std::size_t c = t; c < C; ++c) {
      A.at(t, c) *= inv;
      mpz_fdiv_r(A.at(t, c).get_mpz_t(), A.at(t, c).get_mpz_t(), mod.get_mpz_t());
    }
    if (transforms) {
      for (std::size_t c = 0; c < R; ++c) {
        res.U.at(t, c) *= inv;
        mpz_fdiv_r(res.U.at(t, c).get_mpz_t(), res.U.at(t, c).get_mpz_t(), mod.get_mpz_t());
      }
    }
    // Clear the pivot column below.
    for (std::size_t r = t + 1; r < R; ++r) {
      if (A.at(r, t) == 0) continue;
      mpz_divexact(factor.get_mpz_t(), A.at(r, t).get_mpz_t(), pv.get_mpz_t());
      for (std::size_t c = t; c < C; ++c) {
        mpz_submul(A.at(r, c).get_mpz_t(), factor.get_mpz_t(), A.at(t, c).get_mpz_t());
        mpz_fdiv_r(A.at(r, c).get_mpz_t(), A.at(r, c).get_mpz_t(), mod.get_mpz_t());
      }
      if (transforms) {
        for (std::size_t c = 0; c < R; ++c) {
          mpz_submul(res.U.at(r, c).get_mpz_t(), factor.get_mpz_t(), res.U.at(t, c).get_mpz_t());
          mpz_fdiv_r(res.U.at(r, c).get_mpz_t(), res.U.at(r, c).get_mpz_t(), mod.get_mpz_t());
        }
      }
    }
    // Clear the pivot row to the right; only row t is touched in A.
    for (std::size_t c = t + 1; c < C; ++c) {
      if (A.at(t, c) == 0) continue;
      mpz_divexact(factor.get_mpz_t(), A.at(t, c).get_mpz_t(), pv.get_mpz_t());
      A.at(t, c) = 0;
      if (transforms) {
        for (std::size_t r = 0; r < C; ++r) {
          mpz_submul(res.V.at(r, c).get_mpz_t(), factor.get_mpz_t(), res.V.at(r, t).get_mpz_t());
          mpz_fdiv_r(res.V.at(r, c).get_mpz_t(), res.V.at(r, c).get_mpz_t(), mod.get_mpz_t());
        }
      }
    }
    res.divisors.push_back(best);
  }
  res.indistinct = steps - t;
  res.D = std::move(A);
  if (transforms) {
    res.U.ledger.valid = valid;
    res.V.ledger.valid = valid;
  }
  return res;
}

PadicMatrix solve_left(const PadicMatrix& a, const PadicMatrix& r) {
  check_same_ring(a, r);
  if (a.rows() != a.cols()) raise(ErrorCode::BasisMismatch, "solve needs a square matrix");
  if (a.rows() != r.rows()) raise(ErrorCode::BasisMismatch, "solve dimension mismatch");
  const unsigned valid_in = std::min(a.ledger.valid, r.ledger.valid);
  PadicMatrix a_trunc = a;
  a_trunc.ledger.valid = valid_in;
  const SNFResult s = smith(a_trunc);
  if (s.indistinct > 0)
    raise(ErrorCode::SingularModPValid,
          "matrix is singular modulo p^" + std::to_string(valid_in) + " (" + std::to_string(s.indistinct) +
              " indistinct divisors)");
  const unsigned maxdiv = s.divisors.empty() ? 0 : s.divisors.back();
  if (valid_in <= maxdiv)
    raise(ErrorCode::PrecisionExhausted, "solve would leave no trusted digits");
  const unsigned p = a.p();
  PadicMatrix y = s.U * r;
  mpz_class pvalid, pa;
  mpz_ui_pow_ui(pvalid.get_mpz_t(), p, valid_in);
  for (std::size_t j = 0; j < y.rows(); ++j) {
    const unsigned aj = s.divisors[j];
    mpz_ui_pow_ui(pa.get_mpz_t(), p, aj);
    for (std::size_t c = 0; c < y.cols(); ++c) {
      mpz_class& v = y.at(j, c);
      mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), pvalid.get_mpz_t());
      if (aj == 0) continue;
      if (!mpz_divisible_p(v.get_mpz_t(), pa.get_mpz_t()))
        raise(ErrorCode::NotIntegral, "solution is not integral to the tracked precision");
      mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), pa.get_mpz_t());
    }
  }
  y.ledger.valid = valid_in;
  PadicMatrix x = s.V * y;
  x.ledger.valid = valid_in - maxdiv;
  return x;
}

PadicMatrix solve_right(const PadicMatrix& r, const PadicMatrix& a) {
  return solve_left(a.transpose(), r.transpose()).transpose();
}

PadicMatrix solve_conjugate(const PadicMatrix& a, const PadicMatrix& m, const PadicMatrix& b) {
  return solve_left(a, m * b);
}

unsigned cokernel_valuation_sum(const PadicMatrix& m) {
  const SNFResult s = smith(m, false);
  if (s.indistinct > 0) raise(ErrorCode::SingularModPValid, "matrix is not of full rank to its tracked precision");
  unsigned sum = 0;
  for (unsigned d : s.divisors) sum += d;
  return sum;
}

PadicMatrix linearize(const WittRing& ring, const std::vector<mpz_class>& entries, std::size_t rows,
                      std::size_t cols, bool sigma_twist, unsigned valid) {
  const unsigned f = ring.f();
  if (entries.size() != rows * cols * f) raise(ErrorCode::BasisMismatch, "entry count does not match dimensions");
  PadicMatrix out(ring.p(), ring.W(), rows * f, cols * f);
  out.ledger.valid = std::min(valid, ring.W());
  if (f == 1) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = entries[r * cols + c];
    out.normalize();
    return out;
  }
  std::vector<WittScalar> mults;
  const WittScalar gen = sigma_twist ? ring.frobenius_sigma() : ring.x();
  mults.push_back(ring.one());
  for (unsigned d = 1; d < f; ++d) mults.push_back(ring.mul(mults.back(), gen));
  WittScalar a = ring.zero();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      for (unsigned t = 0; t < f; ++t) a.c[t] = entries[(r * cols + c) * f + t];
      if (ring.is_zero(a)) continue;
      for (unsigned d = 0; d < f; ++d) {
        const WittScalar prod = ring.mul(mults[d], a);
        for (unsigned t = 0; t < f; ++t) out.at(r * f + t, c * f + d) = prod.c[t];
      }
    }
  }
  return out;
}

}  // namespace kchain
