// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "kchain/descent.hpp"
#include "kchain/envelope.hpp"
#include "kchain/linalg.hpp"

namespace kchain {

namespace {

struct QuotientSetup {
  WittRingPtr ring;
  std::vector<WittScalar> E;
  std::shared_ptr<Envelope> quot;
  RelationTables tables;
};

QuotientSetup make_quotient(unsigned p, unsigned f, int n, int e, const std::vector<mpz_class>& eisenstein, int B,
                            unsigned extra_digits) {
  QuotientSetup s;
  const int M = generator_bound(p, n, B);
  s.ring = init_ring(RingParams{p, f, static_cast<unsigned>(M) + 4 + extra_digits, {}});
  s.E = make_eisenstein(*s.ring, eisenstein.empty() ? std::vector<mpz_class>{1} : eisenstein);
  if (static_cast<int>(s.E.size()) - 1 != e) raise(ErrorCode::NotEisenstein, "Eisenstein degree differs from e");
  EnvelopeSpec base{s.ring, n, e, s.E, B, EnvelopeKind::OKOneVar};
  EnvelopeSpec qspec = base;
  qspec.kind = EnvelopeKind::QuotientOneVar;
  s.quot = std::make_shared<Envelope>(qspec);
  LambdaData ld = make_lambda_data(base, s.quot->max_generator());
  s.tables = build_f_tables(*s.quot, *ld.okOne, ld.lambda, ld.ledger);
  return s;
}

bool divisible_by_p(const Envelope& env, const Element& a) {
  const unsigned p = env.ring().p();
  return std::all_of(a.begin(), a.end(), [p](const mpz_class& v) { return mpz_divisible_ui_p(v.get_mpz_t(), p) != 0; });
}

long ipow(long b, long e) {
  long r = 1;
  for (long k = 0; k < e; ++k) r *= b;
  return r;
}

}  // namespace

bool nygaard_nonzero_mod_p(unsigned p, unsigned f, int n, int e, const std::vector<mpz_class>& eisenstein, long a,
                           int N, int B) {
  if (a < 0 || N < 0) raise(ErrorCode::InvalidArgument, "exponents must be non-negative");
  if (a > B) raise(ErrorCode::BoundTooSmall, "z-power exceeds the truncation bound");
  // The largest elementary divisor of can is bounded by the sum of its graded
  // valuations max(N - floor(w/n), 0) over weights 0..B.
  unsigned extra = 4;
  for (int w = 0; w <= B; ++w) extra += static_cast<unsigned>(std::max(N - w / n, 0));
  QuotientSetup s = make_quotient(p, f, n, e, eisenstein, B, extra);
  const Envelope& env = *s.quot;
  std::vector<RawTerm> eterms;
  for (std::size_t k = 0; k < s.E.size(); ++k) eterms.push_back(RawTerm{s.E[k], Monomial{static_cast<int>(k), {}}});
  const Element d = env.reduce(eterms);

  const std::vector<BasisLabel> labels = enumerate_basis(env, BasisKind::Nygaard, N, 0, B);
  std::vector<Element> dpow{env.constant(env.ring().one())};
  std::vector<Element> cols;
  std::vector<std::size_t> rows;
  for (const BasisLabel& label : labels) {
    while (static_cast<int>(dpow.size()) <= label.dtilde) dpow.push_back(env.mul(dpow.back(), d));
    const long idx = env.index_of(label.mono);
    cols.push_back(env.mul(dpow[static_cast<std::size_t>(label.dtilde)], env.basis(static_cast<std::size_t>(idx))));
    rows.push_back(static_cast<std::size_t>(idx));
  }
  const PadicMatrix can = columns_to_matrix(env, cols, rows, false, s.tables.ledger.valid);
  const Element target = env.mul(env.z_power(static_cast<int>(a)), env.pow(d, static_cast<unsigned long>(N)));
  const PadicMatrix rhs = columns_to_matrix(env, {target}, rows, false, s.tables.ledger.valid);
  const PadicMatrix x = solve_left(can, rhs);
  for (std::size_t r = 0; r < x.rows(); ++r)
    if (!mpz_divisible_ui_p(x.at(r, 0).get_mpz_t(), p)) return true;
  return false;
}

NilpotenceVerdict nilpotence_witness(unsigned p, unsigned f, int n, int e, const std::vector<mpz_class>& eisenstein,
                                     NilpotenceMode mode, int B) {
  if (n < 1 || e < 1) raise(ErrorCode::InvalidArgument, "n and e must be positive");
  const long j = (n + e - 1) / e;
  const long pj = ipow(p, j);
  const long jp = (pj - 1) / (static_cast<long>(p) - 1);
  if (B <= 0) B = static_cast<int>(static_cast<long>(p) * jp * e + n + e * pj * static_cast<long>(p));
  NilpotenceVerdict v;
  v.B = B;
  if (mode == NilpotenceMode::Plain) {
    const long K = static_cast<long>(p) * jp * e - pj * (j * e - n);
    v.exponent = K;
    if (B < K) raise(ErrorCode::BoundTooSmall, "truncation bound below the tested exponent");
    QuotientSetup s = make_quotient(p, f, n, e, eisenstein, B, 0);
    v.vanishes = divisible_by_p(*s.quot, s.quot->z_power(static_cast<int>(K)));
    v.sharp = !divisible_by_p(*s.quot, s.quot->z_power(static_cast<int>(K - 1)));
    return v;
  }
  const long k = jp;
  v.exponent = k;
  const int level = static_cast<int>(k * (static_cast<long>(p) - 1));
  const int level_prev = static_cast<int>((k - 1) * (static_cast<long>(p) - 1));
  v.vanishes = !nygaard_nonzero_mod_p(p, f, n, e, eisenstein, k * e, level, B);
  v.sharp = nygaard_nonzero_mod_p(p, f, n, e, eisenstein, (k - 1) * e, level_prev, B);
  return v;
}

}  // namespace kchain
