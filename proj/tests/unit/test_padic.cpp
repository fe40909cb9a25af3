// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "kchain/padic.hpp"

using namespace kchain;

namespace {

WittScalar random_scalar(const WittRing& ring, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> d(-100000, 100000);
  WittScalar s = ring.zero();
  for (unsigned t = 0; t < ring.f(); ++t) s = ring.add(s, ring.mul(ring.from_int(d(rng)), ring.x_power(t)));
  return s;
}

}  // namespace

TEST_CASE("inverse of 2 modulo 5^4 is 313") {
  const WittRingPtr ring = init_ring(RingParams{5, 1, 4, {}});
  const WittScalar inv = ring->invert_unit(ring->from_int(2));
  CHECK(inv.c[0] == 313);
  CHECK(ring->mul(inv, ring->from_int(2)) == ring->one());
}

TEST_CASE("Frobenius of x for x^2 + x + 1 over Z/2^W is -1 - x") {
  const WittRingPtr ring = init_ring(RingParams{2, 2, 12, {1, 1, 1}});
  const WittScalar s = ring->frobenius_sigma();
  const WittScalar expected = ring->sub(ring->neg(ring->one()), ring->x());
  CHECK(s == expected);
}

TEST_CASE("sigma is a ring automorphism of order f lifting the pth power") {
  std::mt19937_64 rng(7);
  for (unsigned p : {2U, 3U, 5U}) {
    for (unsigned f : {1U, 2U, 3U}) {
      const WittRingPtr ring = init_ring(RingParams{p, f, 10, {}});
      for (int trial = 0; trial < 30; ++trial) {
        const WittScalar a = random_scalar(*ring, rng);
        const WittScalar b = random_scalar(*ring, rng);
        CHECK(ring->sigma(ring->add(a, b)) == ring->add(ring->sigma(a), ring->sigma(b)));
        CHECK(ring->sigma(ring->mul(a, b)) == ring->mul(ring->sigma(a), ring->sigma(b)));
        WittScalar it = a;
        for (unsigned k = 0; k < f; ++k) it = ring->sigma(it);
        CHECK(it == a);
        // sigma(a) - a^p is divisible by p.
        const WittScalar diff = ring->sub(ring->sigma(a), ring->pow(a, p));
        CHECK((ring->is_zero(diff) || ring->valuation(diff) >= 1));
      }
    }
  }
}

TEST_CASE("ring axioms, inverses and valuations") {
  std::mt19937_64 rng(11);
  const WittRingPtr ring = init_ring(RingParams{3, 2, 9, {}});
  for (int trial = 0; trial < 100; ++trial) {
    const WittScalar a = random_scalar(*ring, rng);
    const WittScalar b = random_scalar(*ring, rng);
    const WittScalar c = random_scalar(*ring, rng);
    CHECK(ring->mul(ring->mul(a, b), c) == ring->mul(a, ring->mul(b, c)));
    CHECK(ring->mul(a, ring->add(b, c)) == ring->add(ring->mul(a, b), ring->mul(a, c)));
    CHECK(ring->add(a, ring->neg(a)) == ring->zero());
    if (ring->is_unit(a)) CHECK(ring->mul(a, ring->invert_unit(a)) == ring->one());
  }
  const WittScalar u = ring->add(ring->one(), ring->x());
  for (unsigned k = 0; k < 9; ++k) CHECK(ring->valuation(ring->mul(ring->pow(ring->prime(), k), u)) == k);
  CHECK(ring->is_zero(ring->pow(ring->prime(), 9)));
  CHECK_THROWS_AS(ring->invert_unit(ring->prime()), Error);
}

TEST_CASE("exact division by p spends one digit") {
  const WittRingPtr ring = init_ring(RingParams{2, 1, 8, {}});
  PrecisionLedger ledger{8};
  const WittScalar q = ring->exact_divide_p(ring->from_int(6), ledger);
  CHECK(q.c[0] == 3);
  CHECK(ledger.valid == 7);
  PrecisionLedger tight{8};
  try {
    (void)ring->exact_divide_p(ring->from_int(3), tight);
    FAIL("expected NotDivisible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotDivisible);
  }
}

TEST_CASE("precision ledger refuses to go negative") {
  PrecisionLedger l{2};
  l.lose(2);
  CHECK(l.valid == 0);
  try {
    l.lose(1);
    FAIL("expected PrecisionExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PrecisionExhausted);
  }
}

TEST_CASE("integer helpers") {
  CHECK(vp_factorial(10, 2) == 8);
  CHECK(vp_factorial(25, 5) == 6);
  CHECK(vp(mpz_class(48), 2, 100) == 4);
  CHECK(vp(mpz_class(0), 3, 7) == 7);
  CHECK(is_prime(7));
  CHECK_FALSE(is_prime(9));
  for (unsigned p : {2U, 3U, 5U, 7U})
    for (unsigned f : {1U, 2U, 3U, 4U}) CHECK(is_irreducible_mod_p(default_minimal_polynomial(p, f), p));
  CHECK_FALSE(is_irreducible_mod_p({1, 0, 1}, 2));
}

TEST_CASE("ring construction rejects bad parameters") {
  auto code_of = [](RingParams params) {
    try {
      (void)init_ring(std::move(params));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of(RingParams{4, 1, 5, {}}) == ErrorCode::NonPrimeP);
  CHECK(code_of(RingParams{2, 2, 5, {1, 0, 1}}) == ErrorCode::ReducibleMinimalPolynomial);
}
