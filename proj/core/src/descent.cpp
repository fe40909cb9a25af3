// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "kchain/descent.hpp"

#include <algorithm>
#include <utility>

namespace kchain {

DescentContext make_descent_context(WittRingPtr ring, int n, const std::vector<WittScalar>& E, int i) {
  if (n < 1 || i < 1) raise(ErrorCode::InvalidArgument, "n and i must be positive");
  if (static_cast<long long>(i) * n < 2) raise(ErrorCode::InvalidArgument, "weight range F^{[1,in-1]} is empty");
  validate_eisenstein(*ring, E);
  DescentContext ctx;
  ctx.ring = ring;
  ctx.n = n;
  ctx.e = static_cast<int>(E.size()) - 1;
  ctx.i = i;
  ctx.B = i * n - 1;
  ctx.E = E;

  EnvelopeSpec base{ring, n, ctx.e, E, ctx.B, EnvelopeKind::OKOneVar};
  EnvelopeSpec two = base;
  two.kind = EnvelopeKind::OKTwoVar;
  EnvelopeSpec quot = base;
  quot.kind = EnvelopeKind::QuotientOneVar;

  ctx.okTwo = std::make_shared<Envelope>(two);
  ctx.quot = std::make_shared<Envelope>(quot);
  const int U = std::max(ctx.okTwo->max_generator(), ctx.quot->max_generator());
  LambdaData ld = make_lambda_data(base, U);
  ctx.okOne = ld.okOne;
  ctx.lambda = ld.lambda;
  ctx.fTables = build_f_tables(*ctx.quot, *ctx.okOne, ctx.lambda, ld.ledger);
  ctx.gTables = build_g_tables(*ctx.okTwo, *ctx.okOne, ctx.lambda, ld.ledger);
  ctx.ledger.valid = std::min(ctx.fTables.ledger.valid, ctx.gTables.ledger.valid);
  return ctx;
}

Element unit_wu(const DescentContext& ctx) {
  const Envelope& env = *ctx.okTwo;
  const int slots = env.generator_slots();
  Monomial g0{0, std::vector<int>(static_cast<std::size_t>(slots), 0)};
  g0.exps[0] = 1;
  const Element z0 = env.z_power(1);
  const Element z1 = env.add(z0, env.reduce(g0, env.ring().one()));
  // (E(z1) - E(z0)) / (z1 - z0) = sum_k c_k sum_{a+b=k-1} z1^a z0^b.
  Element quotient = env.zero();
  std::vector<Element> z1pow{env.constant(env.ring().one())};
  for (int k = 1; k <= ctx.e; ++k) {
    z1pow.push_back(env.mul(z1pow.back(), z1));
    Element inner = env.zero();
    for (int a = 0; a < k; ++a) inner = env.add(inner, env.mul(z1pow[static_cast<std::size_t>(a)], env.z_power(k - 1 - a)));
    quotient = env.add(quotient, env.scale(inner, ctx.E[static_cast<std::size_t>(k)]));
  }
  const Element term = env.mul(env.phi(quotient), ctx.gTables.phiDivided.at(0));
  return env.add(env.constant(env.ring().one()), term);
}

Element unit_wv(const DescentContext& ctx, const Element& wu) {
  const Envelope& env = *ctx.okTwo;
  int cap = 3;
  for (long w = 1; w <= ctx.B; w *= static_cast<long>(env.ring().p())) ++cap;
  Element x = wu;
  for (int it = 0; it < cap; ++it) {
    Element next = env.mul(wu, env.phi(x));
    if (next == x) return x;
    x = std::move(next);
  }
  raise(ErrorCode::NonConvergent, "w(v) recursion did not stabilize");
}

PadicMatrix columns_to_matrix(const Envelope& env, const std::vector<Element>& columns,
                              const std::vector<std::size_t>& row_index, bool sigma_twist, unsigned valid) {
  const unsigned f = env.f();
  const std::size_t rows = row_index.size();
  const std::size_t cols = columns.size();
  std::vector<mpz_class> entries(rows * cols * f);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r)
      for (unsigned t = 0; t < f; ++t) entries[(r * cols + c) * f + t] = columns[c][row_index[r] * f + t];
  return linearize(env.ring(), entries, rows, cols, sigma_twist, valid);
}

PadicMatrix nabla_OK(const DescentContext& ctx, const Element& wv) {
  const Envelope& env = *ctx.okTwo;
  const int slots = env.generator_slots();
  Monomial g0{0, std::vector<int>(static_cast<std::size_t>(slots), 0)};
  g0.exps[0] = 1;
  const Element step = env.add(env.z_power(1), env.reduce(g0, env.ring().one()));
  std::vector<std::size_t> rows;
  for (int a = 0; a < ctx.B; ++a) {
    Monomial m = g0;
    m.k = a;
    rows.push_back(static_cast<std::size_t>(env.index_of(m)));
  }
  Element t = env.pow(wv, static_cast<unsigned long>(ctx.i));
  std::vector<Element> cols;
  for (int k = 1; k <= ctx.B; ++k) {
    t = env.mul(t, step);
    cols.push_back(t);
  }
  return columns_to_matrix(env, cols, rows, false, ctx.gTables.ledger.valid);
}

ReductionMatrices reduction_matrices(const DescentContext& ctx) {
  const Envelope& env = *ctx.quot;
  std::vector<std::size_t> rows, rows_nabla;
  std::vector<Element> cols, cols_nabla;
  for (int k = 1; k <= ctx.B; ++k) {
    rows.push_back(static_cast<std::size_t>(k));
    cols.push_back(env.z_power(k));
  }
  for (int k = 0; k < ctx.B; ++k) {
    rows_nabla.push_back(static_cast<std::size_t>(k));
    cols_nabla.push_back(env.z_power(k));
  }
  const unsigned valid = ctx.fTables.ledger.valid;
  return ReductionMatrices{columns_to_matrix(env, cols, rows, false, valid),
                           columns_to_matrix(env, cols_nabla, rows_nabla, false, valid)};
}

PadicMatrix nabla_R(const ReductionMatrices& red, const PadicMatrix& nablaOK) {
  return solve_right(red.red_nabla * nablaOK, red.red);
}

PadicMatrix nygaard_nabla(const PadicMatrix& can_tgt, const PadicMatrix& nablaR, const PadicMatrix& can_src) {
  return solve_conjugate(can_tgt, nablaR, can_src);
}

}  // namespace kchain
