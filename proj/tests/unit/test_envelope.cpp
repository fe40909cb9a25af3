// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "kchain/descent.hpp"
#include "kchain/syntomic.hpp"
#include "kchain_oracles/oracles.hpp"

using namespace kchain;

namespace {

DescentContext context(unsigned p, unsigned f, int n, int i, unsigned W, const std::vector<mpz_class>& e = {}) {
  const WittRingPtr ring = make_ring(p, f, W, {});
  return make_descent_context(ring, n, eisenstein_for(*ring, e), i);
}

// Coordinate of a dense element at a monomial, as a signed residue.
mpz_class coord(const Envelope& env, const Element& a, const Monomial& m) {
  const long idx = env.index_of(m);
  REQUIRE(idx >= 0);
  mpz_class v = a[static_cast<std::size_t>(idx) * env.f()];
  if (2 * v > env.ring().modulus()) v -= env.ring().modulus();
  return v;
}

Element random_element(const Envelope& env, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> d(-50, 50);
  Element a = env.zero();
  for (auto& v : a) v = d(rng);
  Element z = env.zero();
  return env.add(a, z);
}

}  // namespace

TEST_CASE("lambda_0 for z + 2 is 1 - 2z + 4z^2 - 8z^3 + ...") {
  const DescentContext ctx = context(2, 1, 2, 3, 20);
  const Element& l0 = ctx.lambda[0];
  const long expected[] = {1, -2, 4, -8, 16, -32};
  const mpz_class m = ctx.ring->p_power(ctx.ledger.valid);
  for (int k = 0; k < 6; ++k) {
    const mpz_class diff = coord(*ctx.okOne, l0, Monomial{k, {}}) - expected[k];
    CHECK(mpz_divisible_p(diff.get_mpz_t(), m.get_mpz_t()));
  }
}

TEST_CASE("R'_0 equals -lambda_0 z0 g0 for p = 2") {
  const DescentContext ctx = context(2, 1, 2, 3, 20);
  const Envelope& two = *ctx.okTwo;
  const Element lam = two.from_series(ctx.lambda[0], *ctx.okOne);
  const Element z0g0 = two.basis(static_cast<std::size_t>(two.index_of(Monomial{1, {1}})));
  const Element expected = two.neg(two.mul(lam, z0g0));
  CHECK(oracle::agree_mod(two, ctx.gTables.rprime[0], expected, ctx.gTables.ledger.valid));
}

TEST_CASE("z0^4 in the envelope of Z/4 at B = 5 is 2 f_1 - 4 z0 f_1") {
  const DescentContext ctx = context(2, 1, 2, 3, 20);
  const Envelope& q = *ctx.quot;
  REQUIRE(q.B() == 5);
  const Element z4 = q.z_power(4);
  Element expected = q.zero();
  q.set_coefficient(expected, static_cast<std::size_t>(q.index_of(Monomial{0, {0, 1}})), q.ring().from_int(2));
  q.set_coefficient(expected, static_cast<std::size_t>(q.index_of(Monomial{1, {0, 1}})), q.ring().from_int(-4));
  CHECK(oracle::agree_mod(q, z4, expected, ctx.fTables.ledger.valid));
}

TEST_CASE("basis sizes and generator bounds") {
  const DescentContext ctx = context(2, 1, 3, 4, 24);
  const int B = ctx.B;
  CHECK(ctx.quot->size() == static_cast<std::size_t>(B + 1));
  CHECK(ctx.okOne->size() == static_cast<std::size_t>(B + 1));
  CHECK(ctx.okTwo->size() == static_cast<std::size_t>((B + 1) * (B + 2) / 2));
  for (std::size_t idx = 0; idx < ctx.quot->size(); ++idx) CHECK(ctx.quot->weight(idx) == static_cast<int>(idx));
  CHECK(generator_bound(2, 2, 5) == 1);
  CHECK(generator_bound(2, 1, 7) == 2);
  CHECK(generator_bound(3, 2, 5) == 0);
  CHECK(enumerate_basis(*ctx.quot, BasisKind::Plain, 0, 1, B).size() == static_cast<std::size_t>(B));
}

TEST_CASE("normal form is idempotent on admissible monomials") {
  const DescentContext ctx = context(3, 1, 2, 5, 16);
  for (const Envelope* env : {ctx.quot.get(), ctx.okTwo.get()}) {
    for (std::size_t idx = 0; idx < env->size(); ++idx) {
      const Element nf = env->reduce(env->monomial(idx), env->ring().one());
      CHECK(nf == env->basis(idx));
    }
  }
}

TEST_CASE("multiplication is associative, commutative and matches raw products") {
  std::mt19937_64 rng(3);
  for (auto [p, n, i] : {std::tuple{2U, 2, 5}, std::tuple{3U, 2, 4}, std::tuple{2U, 3, 4}}) {
    const DescentContext ctx = context(p, 1, n, i, 30);
    for (const Envelope* env : {ctx.quot.get(), ctx.okTwo.get()}) {
      const unsigned valid = std::min(ctx.fTables.ledger.valid, ctx.gTables.ledger.valid);
      for (int trial = 0; trial < 10; ++trial) {
        const Element a = random_element(*env, rng);
        const Element b = random_element(*env, rng);
        const Element c = random_element(*env, rng);
        CHECK(oracle::agree_mod(*env, env->mul(env->mul(a, b), c), env->mul(a, env->mul(b, c)), valid));
        CHECK(env->mul(a, b) == env->mul(b, a));
      }
      std::uniform_int_distribution<std::size_t> pick(0, env->size() - 1);
      for (int trial = 0; trial < 40; ++trial) {
        const std::size_t x = pick(rng), y = pick(rng);
        Monomial prod = env->monomial(x);
        const Monomial& other = env->monomial(y);
        prod.k += other.k;
        prod.exps.resize(std::max(prod.exps.size(), other.exps.size()), 0);
        for (std::size_t u = 0; u < other.exps.size(); ++u) prod.exps[u] += other.exps[u];
        CHECK(env->mul(env->basis(x), env->basis(y)) == env->reduce(prod, env->ring().one()));
      }
    }
  }
}

TEST_CASE("Frobenius on the two-variable envelope is multiplicative and lifts the pth power") {
  std::mt19937_64 rng(5);
  const DescentContext ctx = context(2, 1, 2, 4, 30);
  const Envelope& two = *ctx.okTwo;
  const unsigned valid = ctx.gTables.ledger.valid;
  for (int trial = 0; trial < 10; ++trial) {
    const Element a = random_element(two, rng);
    const Element b = random_element(two, rng);
    CHECK(oracle::agree_mod(two, two.phi(two.mul(a, b)), two.mul(two.phi(a), two.phi(b)), valid));
    CHECK(oracle::agree_mod(two, two.phi(a), two.pow(a, 2), 1));
  }
}

TEST_CASE("the pth-power relations hold in normal form") {
  for (auto [p, n, i] : {std::tuple{2U, 2, 8}, std::tuple{3U, 2, 6}, std::tuple{2U, 3, 5}}) {
    const DescentContext ctx = context(p, 1, n, i, 40);
    const Envelope& q = *ctx.quot;
    for (int u = 0; q.has_relation(u); ++u) {
      Monomial lhs{0, std::vector<int>(static_cast<std::size_t>(q.generator_slots()), 0)};
      lhs.exps[static_cast<std::size_t>(u)] = static_cast<int>(p);
      CHECK(q.reduce(lhs, q.ring().one()) == q.reduce(q.relation(u)));
    }
  }
}

TEST_CASE("reduce agrees with a randomized-order rewriter") {
  for (auto [p, n, i] : {std::tuple{2U, 2, 8}, std::tuple{3U, 2, 6}, std::tuple{2U, 3, 5}}) {
    CAPTURE(p);
    CAPTURE(n);
    const DescentContext ctx = context(p, 1, n, i, 40);
    const Envelope& q = *ctx.quot;
    std::mt19937_64 rng(1000 * p + static_cast<unsigned>(n));
    int mismatches = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const std::vector<RawTerm> raw = oracle::random_raw_input(q, rng);
      const Element ours = q.reduce(raw);
      const Element theirs = oracle::randomized_rewrite(q, raw, rng);
      if (!oracle::agree_mod(q, ours, theirs, ctx.fTables.ledger.valid)) ++mismatches;
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("Eisenstein validation") {
  const WittRingPtr ring = make_ring(2, 1, 10, {});
  auto code_of = [&](const std::vector<mpz_class>& e) {
    try {
      (void)eisenstein_for(*ring, e);
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of({2}) == ErrorCode::NotEisenstein);
  CHECK(code_of({1, 2}) == ErrorCode::NotEisenstein);
  CHECK(eisenstein_for(*ring, {2, 1}).size() == 3);
}
