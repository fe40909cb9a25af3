// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "kchain/syntomic.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>
#include <utility>

namespace kchain {

namespace {

unsigned vp_long(long v, unsigned p) {
  unsigned k = 0;
  while (v != 0 && v % static_cast<long>(p) == 0) {
    v /= static_cast<long>(p);
    ++k;
  }
  return k;
}

unsigned floor_log(unsigned long v, unsigned p) {
  unsigned k = 0;
  while (v >= p) {
    v /= p;
    ++k;
  }
  return k;
}

}  // namespace

long brace(long j, long n) { return j % n == 0 ? n : j; }

PrecisionPlan precision_plan(unsigned p, unsigned f, int n, int i) {
  (void)f;
  if (n < 1 || i < 1) raise(ErrorCode::InvalidArgument, "n and i must be positive");
  const long B = static_cast<long>(i) * n - 1;
  PrecisionPlan plan;
  unsigned target = 0;
  for (long j = 1; j <= B; ++j) target += (j % n != 0 ? 1U : 0U) + vp_long(brace(j, n), p);
  unsigned long working = 2UL * target;
  if (B >= 1) working += floor_log(static_cast<unsigned long>(B), p);
  for (long s = p; s <= i - 1; ++s) working += static_cast<unsigned long>(n) * vp_factorial(static_cast<unsigned long>(s), p);
  working += static_cast<unsigned long>(n) * static_cast<unsigned long>(i) * static_cast<unsigned long>(i - 1) / 2;
  plan.target = target;
  plan.working = static_cast<unsigned>(std::max<unsigned long>(working, 2));
  return plan;
}

std::vector<BasisLabel> can_basis(const DescentContext& ctx, CanSide side) {
  if (side == CanSide::Source) return enumerate_basis(*ctx.quot, BasisKind::Nygaard, ctx.i, 1, ctx.B);
  return enumerate_basis(*ctx.quot, BasisKind::Nygaard, ctx.i - 1, 0, ctx.B - 1);
}

PadicMatrix can_matrix(const DescentContext& ctx, CanSide side) {
  const Envelope& env = *ctx.quot;
  const std::vector<BasisLabel> labels = can_basis(ctx, side);
  std::vector<RawTerm> eterms;
  for (std::size_t k = 0; k < ctx.E.size(); ++k) eterms.push_back(RawTerm{ctx.E[k], Monomial{static_cast<int>(k), {}}});
  const Element d = env.reduce(eterms);
  std::vector<Element> dpow{env.constant(env.ring().one())};
  std::vector<Element> cols;
  std::vector<std::size_t> rows;
  for (const BasisLabel& label : labels) {
    while (static_cast<int>(dpow.size()) <= label.dtilde) dpow.push_back(env.mul(dpow.back(), d));
    const long idx = env.index_of(label.mono);
    cols.push_back(env.mul(dpow[static_cast<std::size_t>(label.dtilde)], env.basis(static_cast<std::size_t>(idx))));
    rows.push_back(static_cast<std::size_t>(idx));
  }
  return columns_to_matrix(env, cols, rows, false, ctx.fTables.ledger.valid);
}

PadicMatrix phi_matrix(const DescentContext& ctx) {
  const Envelope& env = *ctx.quot;
  const std::vector<BasisLabel> labels = can_basis(ctx, CanSide::Source);
  std::vector<Element> cols;
  std::vector<std::size_t> rows;
  for (const BasisLabel& label : labels) {
    const long idx = env.index_of(label.mono);
    cols.push_back(env.phi(env.basis(static_cast<std::size_t>(idx))));
    rows.push_back(static_cast<std::size_t>(idx));
  }
  return columns_to_matrix(env, cols, rows, true, ctx.fTables.ledger.valid);
}

Assembly assemble(const DescentContext& ctx, const PrecisionPlan& plan) {
  Assembly out;
  const ReductionMatrices red = reduction_matrices(ctx);
  const Element wu = unit_wu(ctx);
  const Element wv = unit_wv(ctx, wu);
  out.nablaOK = nabla_OK(ctx, wv);
  out.red = red.red;
  out.redNabla = red.red_nabla;
  const PadicMatrix nR = nabla_R(red, out.nablaOK);
  out.canSource = can_matrix(ctx, CanSide::Source);
  out.canTarget = can_matrix(ctx, CanSide::NablaTarget);
  const PadicMatrix ph = phi_matrix(ctx);
  const PadicMatrix canPhi = out.canSource - ph;
  const PadicMatrix nN = nygaard_nabla(out.canTarget, nR, out.canSource);
  const PadicMatrix C = solve_right(nR * canPhi, nN);
  out.syn0 = vstack(canPhi, nN);
  out.syn1 = hstack(nR, -C);
  out.square = SyntomicSquare{canPhi, nN, nR, C};
  out.valid = std::min(out.syn0.ledger.valid, out.syn1.ledger.valid);
  if (out.valid < plan.target)
    raise(ErrorCode::PrecisionExhausted, "final precision " + std::to_string(out.valid) + " is below the target " +
                                             std::to_string(plan.target));
  PadicMatrix residual = out.syn1 * out.syn0;
  residual.ledger.valid = out.valid;
  if (!residual.is_zero_mod_valid()) raise(ErrorCode::CheckFailed, "syn1 * syn0 does not vanish");
  return out;
}

Cohomology cohomology(const PadicMatrix& syn0, const PadicMatrix& syn1, const PrecisionPlan& plan) {
  Cohomology out;
  const SNFResult s0 = smith(syn0, false);
  if (s0.indistinct > 0) {
    if (s0.valid <= plan.target)
      raise(ErrorCode::PrecisionExhausted, "syn0 has divisors beyond the tracked precision");
    raise(ErrorCode::H0Nonzero, "syn0 is not injective");
  }
  for (unsigned d : s0.divisors)
    if (d > 0) out.h1.push_back(d);
  const SNFResult s1 = smith(syn1, false);
  if (s1.indistinct > 0) {
    if (s1.valid <= plan.target)
      raise(ErrorCode::PrecisionExhausted, "syn1 has divisors beyond the tracked precision");
    raise(ErrorCode::CheckFailed, "syn1 does not have full rank");
  }
  for (unsigned d : s1.divisors)
    if (d > 0) out.h2.push_back(d);
  return out;
}

bool KGroupResult::operator==(const KGroupResult& o) const {
  return p == o.p && f == o.f && n == o.n && i == o.i && eisenstein == o.eisenstein && h1 == o.h1 && h2 == o.h2 &&
         precision.target == o.precision.target && precision.working == o.precision.working &&
         precision.valid == o.precision.valid && millis == o.millis;
}

WittRingPtr make_ring(unsigned p, unsigned f, unsigned W, const std::vector<mpz_class>& hLift) {
  return init_ring(RingParams{p, f, W, hLift});
}

std::vector<WittScalar> eisenstein_for(const WittRing& ring, const std::vector<mpz_class>& nonconstant) {
  if (nonconstant.empty()) return make_eisenstein(ring, {mpz_class(1)});
  return make_eisenstein(ring, nonconstant);
}

KGroupResult kgroups(unsigned p, unsigned f, int n, int i, const KGroupOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (!is_prime(p)) raise(ErrorCode::NonPrimeP, "p must be prime");
  if (f < 1) raise(ErrorCode::InvalidArgument, "f must be positive");
  const PrecisionPlan plan = precision_plan(p, f, n, i);
  KGroupResult result;
  result.p = p;
  result.f = f;
  result.n = n;
  result.i = i;
  result.eisenstein = options.eisenstein.empty() ? std::vector<mpz_class>{1} : options.eisenstein;
  result.precision.target = plan.target;
  unsigned W = options.precision > 0 ? options.precision : plan.effective();

  const long B = static_cast<long>(i) * n - 1;
  if (B < 1) {
    // F^{[1,in-1]} is empty: both differentials are 0 x 0.
    const WittRingPtr ring = make_ring(p, f, std::max(W, 1U), options.hLift);
    (void)eisenstein_for(*ring, options.eisenstein);
    result.precision.working = W;
    result.precision.valid = W;
  } else {
    for (;;) {
      try {
        const WittRingPtr ring = make_ring(p, f, W, options.hLift);
        const std::vector<WittScalar> E = eisenstein_for(*ring, options.eisenstein);
        const DescentContext ctx = make_descent_context(ring, n, E, i);
        // Every solve in the square inverts an isogeny, so a matrix that looks
        // singular modulo the trusted digits means the digits ran out.
        Assembly as;
        try {
          as = assemble(ctx, plan);
        } catch (const Error& err) {
          if (err.code() != ErrorCode::SingularModPValid) throw;
          raise(ErrorCode::PrecisionExhausted, std::string("W = ") + std::to_string(W) + " too small: " + err.what());
        }
        const Cohomology coh = cohomology(as.syn0, as.syn1, plan);
        result.h1 = coh.h1;
        result.h2 = coh.h2;
        result.precision.working = W;
        result.precision.valid = as.valid;
        break;
      } catch (const Error& err) {
        if (err.code() != ErrorCode::PrecisionExhausted || !options.adaptive || W >= options.max_precision) throw;
        W = std::min(2 * W, options.max_precision);
      }
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  result.millis = std::chrono::duration<double, std::milli>(stop - start).count();
  return result;
}

bool angeltveit_check(const KGroupResult& r) {
  const long s1 = std::accumulate(r.h1.begin(), r.h1.end(), 0L);
  const long s2 = std::accumulate(r.h2.begin(), r.h2.end(), 0L);
  return s1 - s2 == static_cast<long>(r.f) * r.i * (r.n - 1);
}

long even_vanishing_threshold(unsigned p, int e, int n) {
  if (e < 1 || n < 1) raise(ErrorCode::InvalidArgument, "e and n must be positive");
  const long j = (n + e - 1) / e;
  mpz_class pj, jp;
  mpz_ui_pow_ui(pj.get_mpz_t(), p, static_cast<unsigned long>(j));
  jp = (pj - 1) / (p - 1);
  const mpz_class num = mpz_class(p) * (mpz_class(p) * jp * e - pj * j * e + pj * n);
  const mpz_class den = mpz_class(p - 1) * e;
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q.get_si() + 1;
}

mpz_class full_odd_order(const KGroupResult& r) {
  mpz_class q, qi, pp;
  mpz_ui_pow_ui(q.get_mpz_t(), r.p, r.f);
  mpz_pow_ui(qi.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(r.i));
  const unsigned long s = std::accumulate(r.h1.begin(), r.h1.end(), 0UL);
  mpz_ui_pow_ui(pp.get_mpz_t(), r.p, s);
  return (qi - 1) * pp;
}

unsigned expected_can_sum(unsigned, unsigned f, int n, int i) {
  unsigned s = 0;
  for (long j = 1; j <= static_cast<long>(i) * n - 1; ++j) s += static_cast<unsigned>(i - j / n);
  return f * s;
}

unsigned expected_red_sum(unsigned p, unsigned f, int n, int i) {
  unsigned s = 0;
  for (long j = 1; j <= static_cast<long>(i) * n - 1; ++j) s += vp_factorial(static_cast<unsigned long>(j / n), p);
  return f * s;
}

unsigned expected_nablaR_sum(unsigned p, unsigned f, int n, int i) {
  unsigned s = 0;
  for (long j = 1; j <= static_cast<long>(i) * n - 1; ++j) s += vp_long(brace(j, n), p);
  return f * s;
}

unsigned expected_nablaOK_sum(unsigned p, unsigned f, int n, int i) {
  unsigned s = 0;
  for (long j = 1; j <= static_cast<long>(i) * n - 1; ++j) s += vp_long(j, p);
  return f * s;
}

unsigned expected_nygaard_sum(unsigned p, unsigned f, int n, int i) {
  return f * precision_plan(p, f, n, i).target;
}

std::vector<IsogenyCheck> isogeny_checks(unsigned p, unsigned f, int n, int i, const KGroupOptions& options) {
  const PrecisionPlan plan = precision_plan(p, f, n, i);
  const unsigned W = options.precision > 0 ? options.precision : plan.effective();
  const WittRingPtr ring = make_ring(p, f, W, options.hLift);
  const std::vector<WittScalar> E = eisenstein_for(*ring, options.eisenstein);
  const DescentContext ctx = make_descent_context(ring, n, E, i);
  const Assembly as = assemble(ctx, plan);
  return {
      {"can", cokernel_valuation_sum(as.canSource), expected_can_sum(p, f, n, i)},
      {"red", cokernel_valuation_sum(as.red), expected_red_sum(p, f, n, i)},
      {"nabla_R", cokernel_valuation_sum(as.square.nabla), expected_nablaR_sum(p, f, n, i)},
      {"nabla_OK", cokernel_valuation_sum(as.nablaOK), expected_nablaOK_sum(p, f, n, i)},
      {"nygaard_nabla", cokernel_valuation_sum(as.square.nygNabla), expected_nygaard_sum(p, f, n, i)},
  };
}

}  // namespace kchain
