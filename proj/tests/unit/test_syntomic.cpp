// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <numeric>

#include "kchain/syntomic.hpp"
#include "kchain/cli.hpp"

using namespace kchain;

namespace {

DescentContext context(unsigned p, unsigned f, int n, int i, unsigned W, const std::vector<mpz_class>& e = {}) {
  const WittRingPtr ring = make_ring(p, f, W, {});
  return make_descent_context(ring, n, eisenstein_for(*ring, e), i);
}

mpz_class signed_entry(const PadicMatrix& m, std::size_t r, std::size_t c) {
  mpz_class v = m.at(r, c);
  if (2 * v > m.modulus()) v -= m.modulus();
  return v;
}

ErrorCode code_of(unsigned p, unsigned f, int n, int i, const KGroupOptions& opt) {
  try {
    (void)kgroups(p, f, n, i, opt);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("precision plan examples") {
  const PrecisionPlan a = precision_plan(2, 1, 2, 2);
  CHECK(a.target == 3);
  CHECK(a.working == 9);
  const PrecisionPlan b = precision_plan(3, 1, 2, 1);
  CHECK(b.target == 1);
  CHECK(b.working == 2);
  CHECK(brace(4, 2) == 2);
  CHECK(brace(3, 2) == 3);
}

TEST_CASE("can on the Nygaard basis of Z/4 at weight 2") {
  const DescentContext ctx = context(2, 1, 2, 2, 12);
  const PadicMatrix can = can_matrix(ctx, CanSide::Source);
  REQUIRE(can.rows() == 3);
  REQUIRE(can.cols() == 3);
  const long expected[3][3] = {{4, 0, 0}, {4, 2, 0}, {1, 1, 2}};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(signed_entry(can, r, c) == expected[r][c]);
}

TEST_CASE("differentials compose to zero and syn0 is injective") {
  for (auto [p, n, i] : {std::tuple{2U, 2, 3}, std::tuple{3U, 2, 3}, std::tuple{2U, 3, 2}, std::tuple{5U, 2, 2}}) {
    const PrecisionPlan plan = precision_plan(p, 1, n, i);
    const DescentContext ctx = context(p, 1, n, i, plan.effective());
    const Assembly as = assemble(ctx, plan);
    PadicMatrix residual = as.syn1 * as.syn0;
    residual.ledger.valid = as.valid;
    CHECK(residual.is_zero_mod_valid());
    const SNFResult s0 = smith(as.syn0, false);
    CHECK(s0.indistinct == 0);
    CHECK(s0.divisors.size() == as.syn0.cols());
    CHECK(as.valid >= plan.target);
  }
}

TEST_CASE("K-groups of Z/4 in low degrees") {
  const std::vector<std::pair<std::vector<unsigned>, std::vector<unsigned>>> expected = {
      {{1}, {}}, {{3}, {1}}, {{3}, {}}, {{1, 3}, {}}, {{1, 1, 3}, {}}};
  for (int i = 1; i <= 5; ++i) {
    const KGroupResult r = kgroups(2, 1, 2, i);
    CHECK(r.h1 == expected[static_cast<std::size_t>(i - 1)].first);
    CHECK(r.h2 == expected[static_cast<std::size_t>(i - 1)].second);
    CHECK(angeltveit_check(r));
  }
}

TEST_CASE("computed groups match the checked-in tables for small ranks") {
  for (const char* name : {"appendix_p2.jsonl", "appendix_p3.jsonl", "appendix_p5.jsonl", "appendix_p7.jsonl"}) {
    for (const cli::JobOutcome& o : cli::read_fixture(std::string(KCHAIN_TEST_DATA_DIR) + "/" + name)) {
      if (!o.result || (o.key.i * o.key.n - 1) > 14) continue;
      CAPTURE(o.key.p);
      CAPTURE(o.key.n);
      CAPTURE(o.key.i);
      const KGroupResult r = kgroups(o.key.p, 1, o.key.n, o.key.i);
      CHECK(r.h1 == o.result->h1);
      CHECK(r.h2 == o.result->h2);
      for (unsigned v : r.h1) CHECK(v < r.precision.valid);
      for (unsigned v : r.h2) CHECK(v < r.precision.valid);
    }
  }
}

TEST_CASE("Angeltveit identity for ramified and unramified extensions") {
  struct Case {
    unsigned p, f;
    int n, i;
    std::vector<mpz_class> e;
  };
  const std::vector<Case> cases = {{2, 2, 2, 2, {}},  {2, 2, 2, 3, {}},    {3, 2, 2, 2, {}},   {2, 1, 3, 3, {2, 1}},
                                   {2, 1, 4, 2, {2, 1}}, {2, 1, 3, 2, {0, 3}}, {3, 1, 4, 2, {3, 0, 1}}};
  for (const Case& c : cases) {
    KGroupOptions opt;
    opt.eisenstein = c.e;
    const KGroupResult r = kgroups(c.p, c.f, c.n, c.i, opt);
    CAPTURE(c.p);
    CAPTURE(c.n);
    CAPTURE(c.i);
    CHECK(angeltveit_check(r));
  }
}

TEST_CASE("n = 1 gives the residue field: no p-torsion") {
  for (int i = 1; i <= 4; ++i) {
    const KGroupResult r = kgroups(3, 1, 1, i);
    CHECK(r.h1.empty());
    CHECK(r.h2.empty());
  }
}

TEST_CASE("lowering W below the target raises PrecisionExhausted") {
  KGroupOptions opt;
  opt.precision = precision_plan(2, 1, 2, 2).target - 1;
  CHECK(code_of(2, 1, 2, 2, opt) == ErrorCode::PrecisionExhausted);
  opt.adaptive = true;
  const KGroupResult r = kgroups(2, 1, 2, 2, opt);
  CHECK(r.h1 == std::vector<unsigned>{3});
  CHECK(r.h2 == std::vector<unsigned>{1});
  CHECK(r.precision.working > opt.precision);
}

TEST_CASE("isogeny valuation sums match closed forms") {
  for (auto [p, n, i] : {std::tuple{2U, 2, 3}, std::tuple{3U, 3, 2}, std::tuple{5U, 2, 3}}) {
    for (const IsogenyCheck& c : isogeny_checks(p, 1, n, i)) {
      CAPTURE(c.map);
      CHECK(c.observed == c.expected);
    }
  }
  CHECK(expected_can_sum(2, 1, 2, 2) == 4);
}

TEST_CASE("even vanishing thresholds") {
  CHECK(even_vanishing_threshold(2, 1, 2) == 13);
  CHECK(even_vanishing_threshold(3, 1, 2) == 19);
}

TEST_CASE("nilpotence witnesses for Z/4") {
  const NilpotenceVerdict plain = nilpotence_witness(2, 1, 2, 1, {}, NilpotenceMode::Plain);
  CHECK(plain.exponent == 6);
  CHECK(plain.vanishes);
  CHECK(plain.sharp);
  const NilpotenceVerdict nyg = nilpotence_witness(2, 1, 2, 1, {}, NilpotenceMode::Nygaard);
  CHECK(nyg.exponent == 3);
  CHECK(nyg.vanishes);
  CHECK(nyg.sharp);
}

TEST_CASE("full odd order includes the prime-to-p part") {
  const KGroupResult r = kgroups(2, 1, 2, 2);
  CHECK(full_odd_order(r) == 3 * 8);
}

TEST_CASE("input validation") {
  CHECK(code_of(4, 1, 2, 2, {}) == ErrorCode::NonPrimeP);
  KGroupOptions bad;
  bad.eisenstein = {2};
  CHECK(code_of(2, 1, 2, 2, bad) == ErrorCode::NotEisenstein);
}
