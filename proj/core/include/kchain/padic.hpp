// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <memory>
#include <vector>

#include "kchain/error.hpp"

namespace kchain {

// Parameters of the unramified coefficient ring W(F_q) = (Z/p^W)[x]/hLift(x).
struct RingParams {
  unsigned p = 2;
  unsigned f = 1;
  unsigned W = 1;
  // Monic lift of the minimal polynomial of x over F_p, low-to-high, size f+1.
  // Empty means "use the default": x for f=1, the lexicographically smallest
  // monic irreducible polynomial of degree f otherwise.
  std::vector<mpz_class> hLift;
};

// Trusted number of low-order p-adic digits of a table or matrix.
struct PrecisionLedger {
  unsigned valid = 0;

  void lose(unsigned digits);
};

// Element of W(F_q) mod p^W as coordinates in the basis 1, x, ..., x^{f-1}.
struct WittScalar {
  std::vector<mpz_class> c;

  bool operator==(const WittScalar& other) const { return c == other.c; }
};

bool is_prime(unsigned long n);

// Smallest monic irreducible polynomial of degree f over F_p, lifted to Z.
std::vector<mpz_class> default_minimal_polynomial(unsigned p, unsigned f);

// Rabin irreducibility test over F_p; coefficients low-to-high, monic.
bool is_irreducible_mod_p(const std::vector<mpz_class>& h, unsigned p);

class WittRing {
 public:
  explicit WittRing(RingParams params);

  unsigned p() const { return p_; }
  unsigned f() const { return f_; }
  unsigned W() const { return W_; }
  const mpz_class& modulus() const { return pW_; }
  const mpz_class& p_power(unsigned k) const;
  const std::vector<mpz_class>& hLift() const { return h_; }

  WittScalar zero() const;
  WittScalar one() const;
  WittScalar x() const;
  WittScalar prime() const;
  WittScalar from_int(const mpz_class& v) const;

  WittScalar add(const WittScalar& a, const WittScalar& b) const;
  WittScalar sub(const WittScalar& a, const WittScalar& b) const;
  WittScalar neg(const WittScalar& a) const;
  WittScalar mul(const WittScalar& a, const WittScalar& b) const;
  WittScalar pow(const WittScalar& a, unsigned long e) const;

  bool is_zero(const WittScalar& a) const;
  bool is_unit(const WittScalar& a) const { return valuation(a) == 0; }

  // Largest v <= W with p^v dividing every coordinate.
  unsigned valuation(const WittScalar& s) const;

  WittScalar invert_unit(const WittScalar& s) const;

  // s / p; the ledger loses one digit.
  WittScalar exact_divide_p(const WittScalar& s, PrecisionLedger& ledger) const;

  // sigma(x): the root of hLift congruent to x^p mod p.
  const WittScalar& frobenius_sigma() const { return sigma_x_; }
  // The ring automorphism determined by sigma(x).
  WittScalar sigma(const WittScalar& s) const;

  // Flat kernels on f consecutive mpz_class values, used by the envelope and
  // matrix code to avoid temporaries.
  void reduce(mpz_class* a) const;                                     // mod p^W
  void mul_into(mpz_class* dst, const mpz_class* a, const mpz_class* b) const;  // dst = a*b mod p^W
  void addmul(mpz_class* dst, const mpz_class* a, const mpz_class* b) const;    // dst += a*b, unreduced mod p^W
  void sigma_into(mpz_class* dst, const mpz_class* a) const;
  unsigned valuation(const mpz_class* a) const;

  // Coordinates of x^d for d < 2f-1 after reduction mod hLift; used by
  // linearization.
  WittScalar x_power(unsigned d) const;

 private:
  void poly_mul_reduce(std::vector<mpz_class>& out, const mpz_class* a, const mpz_class* b) const;

  unsigned p_, f_, W_;
  mpz_class pW_;
  std::vector<mpz_class> ppow_;
  std::vector<mpz_class> h_;
  WittScalar sigma_x_;
  // sigma as an f x f matrix: column d holds sigma(x)^d.
  std::vector<WittScalar> sigma_cols_;
};

using WittRingPtr = std::shared_ptr<const WittRing>;

WittRingPtr init_ring(RingParams params);

// p-adic valuation of a nonzero integer (returns cap for zero).
unsigned vp(const mpz_class& v, unsigned p, unsigned cap);
unsigned vp_factorial(unsigned long n, unsigned p);

}  // namespace kchain
