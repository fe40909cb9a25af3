// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <vector>

#include "kchain/padic.hpp"

namespace kchain {

// Dense matrix over Z/p^W with a trusted-digit counter.
class PadicMatrix {
 public:
  PadicMatrix() = default;
  PadicMatrix(unsigned p, unsigned W, std::size_t rows, std::size_t cols);

  static PadicMatrix identity(unsigned p, unsigned W, std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  unsigned p() const { return p_; }
  unsigned W() const { return W_; }
  const mpz_class& modulus() const { return modulus_; }

  mpz_class& at(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const mpz_class& at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  // Reduces every entry to its least non-negative residue mod p^W.
  void normalize();
  // Valuation of an entry, capped at valid.
  unsigned valuation(std::size_t r, std::size_t c) const;
  // Whether all entries vanish mod p^valid.
  bool is_zero_mod_valid() const;

  PadicMatrix transpose() const;
  PadicMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

  PrecisionLedger ledger;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  unsigned p_ = 2, W_ = 1;
  mpz_class modulus_ = 2;
  std::vector<mpz_class> entries_;
};

PadicMatrix operator*(const PadicMatrix& a, const PadicMatrix& b);
PadicMatrix operator+(const PadicMatrix& a, const PadicMatrix& b);
PadicMatrix operator-(const PadicMatrix& a, const PadicMatrix& b);
PadicMatrix operator-(const PadicMatrix& a);
PadicMatrix vstack(const PadicMatrix& top, const PadicMatrix& bottom);
PadicMatrix hstack(const PadicMatrix& left, const PadicMatrix& right);

struct SNFResult {
  PadicMatrix U, D, V;              // U * M * V = D mod p^valid
  std::vector<unsigned> divisors;   // finite divisor valuations, non-decreasing
  std::size_t indistinct = 0;       // diagonal slots with valuation >= valid
  unsigned valid = 0;
};

// Minimal-valuation pivoting, ties broken by row-major position.
SNFResult smith(const PadicMatrix& m, bool transforms = true);

// X with A X = R, for square A that is rationally invertible.
PadicMatrix solve_left(const PadicMatrix& a, const PadicMatrix& r);
// X with X A = R.
PadicMatrix solve_right(const PadicMatrix& r, const PadicMatrix& a);
// X with A X = M B.
PadicMatrix solve_conjugate(const PadicMatrix& a, const PadicMatrix& m, const PadicMatrix& b);

// Sum of elementary-divisor valuations; raises SingularModPValid when the
// matrix is not of full rank to its tracked precision.
unsigned cokernel_valuation_sum(const PadicMatrix& m);

// W(F_q)-matrix stored row-major with f residues per entry, expanded to the
// Z_p-matrix in the bases x^d * beta. With sigma_twist the column for
// x^d * beta is sigma(x)^d times the image of beta.
PadicMatrix linearize(const WittRing& ring, const std::vector<mpz_class>& entries, std::size_t rows,
                      std::size_t cols, bool sigma_twist, unsigned valid);

}  // namespace kchain
