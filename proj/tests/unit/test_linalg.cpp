// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "kchain/linalg.hpp"
#include "kchain/padic.hpp"
#include "kchain_oracles/oracles.hpp"

using namespace kchain;

namespace {

using IntMatrix = std::vector<std::vector<mpz_class>>;

PadicMatrix from_ints(unsigned p, unsigned W, const IntMatrix& a) {
  PadicMatrix m(p, W, a.size(), a[0].size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a[0].size(); ++c) m.at(r, c) = a[r][c];
  m.normalize();
  return m;
}

IntMatrix random_matrix(std::mt19937_64& rng, unsigned p, std::size_t n) {
  std::uniform_int_distribution<int> entry(-9, 9);
  std::uniform_int_distribution<int> scale(0, 3);
  IntMatrix a(n, std::vector<mpz_class>(n));
  for (auto& row : a) {
    const int s = scale(rng);
    for (auto& v : row) {
      v = entry(rng);
      for (int t = 0; t < s; ++t) v *= p;
    }
  }
  if (std::uniform_int_distribution<int>(0, 9)(rng) == 0) a[n - 1] = a[0];
  return a;
}

bool equal_mod(const PadicMatrix& a, const PadicMatrix& b, unsigned digits) {
  const mpz_class m = [&] {
    mpz_class r = 1;
    for (unsigned k = 0; k < digits; ++k) r *= a.p();
    return r;
  }();
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const mpz_class d = a.at(r, c) - b.at(r, c);
      if (!mpz_divisible_p(d.get_mpz_t(), m.get_mpz_t())) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("elementary divisors of [[2,4],[6,8]] over Z_2 are 2 and 4") {
  const SNFResult s = smith(from_ints(2, 10, {{2, 4}, {6, 8}}));
  CHECK(s.divisors == std::vector<unsigned>{1, 2});
  CHECK(s.indistinct == 0);
}

TEST_CASE("SNF transforms satisfy U M V = D") {
  std::mt19937_64 rng(17);
  for (unsigned p : {2U, 3U, 5U}) {
    for (int trial = 0; trial < 30; ++trial) {
      const PadicMatrix m = from_ints(p, 20, random_matrix(rng, p, 5));
      const SNFResult s = smith(m);
      CHECK(equal_mod(s.U * m * s.V, s.D, s.valid));
      for (std::size_t r = 0; r < s.D.rows(); ++r)
        for (std::size_t c = 0; c < s.D.cols(); ++c)
          if (r != c) CHECK(s.D.valuation(r, c) >= s.valid);
      CHECK(std::is_sorted(s.divisors.begin(), s.divisors.end()));
    }
  }
}

TEST_CASE("SNF divisor valuations agree with determinantal divisors") {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (unsigned p : {2U, 3U, 5U}) {
    for (int trial = 0; trial < 100; ++trial) {
      const IntMatrix a = random_matrix(rng, p, 6);
      const std::vector<unsigned> expected = oracle::determinantal_divisor_valuations(a, p);
      const oracle::LibrarySnf got = oracle::library_snf(a, p, 64);
      CHECK(got.divisors == expected);
      CHECK(got.indistinct == 6 - expected.size());
      ++checked;
    }
  }
  CHECK(checked == 300);
}

TEST_CASE("solve_left and solve_right recover integral solutions") {
  std::mt19937_64 rng(29);
  for (unsigned p : {2U, 3U}) {
    for (int trial = 0; trial < 20; ++trial) {
      IntMatrix ai = random_matrix(rng, p, 4);
      for (std::size_t k = 0; k < 4; ++k) ai[k][k] += 1;  // usually nonsingular
      const PadicMatrix a = from_ints(p, 40, ai);
      const SNFResult s = smith(a, false);
      if (s.indistinct > 0) continue;
      std::uniform_int_distribution<int> d(-20, 20);
      PadicMatrix x(p, 40, 4, 2);
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 2; ++c) x.at(r, c) = d(rng);
      x.normalize();
      const PadicMatrix sol = solve_left(a, a * x);
      CHECK(equal_mod(sol, x, sol.ledger.valid));
      CHECK(sol.ledger.valid == 40 - s.divisors.back());
      const PadicMatrix xt = x.transpose();
      const PadicMatrix sol2 = solve_right(xt * a, a);
      CHECK(equal_mod(sol2, xt, sol2.ledger.valid));
    }
  }
}

TEST_CASE("solve reports non-integral and singular systems") {
  auto code_of = [](const PadicMatrix& a, const PadicMatrix& r) {
    try {
      (void)solve_left(a, r);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of(from_ints(2, 8, {{2}}), from_ints(2, 8, {{1}})) == ErrorCode::NotIntegral);
  CHECK(code_of(from_ints(2, 8, {{1, 1}, {1, 1}}), from_ints(2, 8, {{1}, {1}})) == ErrorCode::SingularModPValid);
  CHECK(code_of(from_ints(2, 3, {{8}}), from_ints(2, 3, {{0}})) == ErrorCode::SingularModPValid);
}

TEST_CASE("cokernel valuation sums") {
  CHECK(cokernel_valuation_sum(from_ints(3, 10, {{3, 0}, {0, 9}})) == 3);
  CHECK(cokernel_valuation_sum(from_ints(2, 10, {{2, 4}, {6, 8}})) == 3);
}

TEST_CASE("arithmetic tracks the smaller precision") {
  PadicMatrix a = PadicMatrix::identity(2, 10, 2);
  PadicMatrix b = PadicMatrix::identity(2, 10, 2);
  a.ledger.valid = 7;
  b.ledger.valid = 5;
  CHECK((a * b).ledger.valid == 5);
  CHECK((a + b).ledger.valid == 5);
  CHECK(vstack(a, b).ledger.valid == 5);
  CHECK(hstack(a, b).rows() == 2);
  CHECK(hstack(a, b).cols() == 4);
}

TEST_CASE("linearize expands multiplication by x in the basis 1, x") {
  const WittRingPtr ring = init_ring(RingParams{2, 2, 8, {1, 1, 1}});
  const WittScalar x = ring->x();
  const PadicMatrix m = linearize(*ring, x.c, 1, 1, false, 8);
  const mpz_class minus_one = ring->modulus() - 1;
  CHECK(m.at(0, 0) == 0);
  CHECK(m.at(1, 0) == 1);
  CHECK(m.at(0, 1) == minus_one);
  CHECK(m.at(1, 1) == minus_one);
  // With the Frobenius twist the column of x * 1 holds sigma(x) = -1 - x.
  const PadicMatrix t = linearize(*ring, ring->one().c, 1, 1, true, 8);
  CHECK(t.at(0, 1) == minus_one);
  CHECK(t.at(1, 1) == minus_one);
}
