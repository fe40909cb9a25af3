// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "kchain/descent.hpp"

namespace kchain {

struct PrecisionPlan {
  unsigned target = 0;   // sum over 1 <= j <= in-1 of eps(i,j) + v_p{j,n}
  unsigned working = 2;  // working precision W from the closed form, floored at 2
  unsigned margin = 2;   // extra digits: one for delta(E(z0)) in lambda_0, one so divisors equal to the target stay distinguishable

  unsigned effective() const { return working + margin; }
};

// {j, n}: n when n divides j, j otherwise.
long brace(long j, long n);

PrecisionPlan precision_plan(unsigned p, unsigned f, int n, int i);

enum class CanSide {
  Source,       // N^{>=i} on F^{[1,in-1]} to F^{[1,in-1]}
  NablaTarget,  // N^{>=i-1} on F^{[0,in-2]} to F^{[0,in-2]}
};

// Nygaard labels (d~ exponent and monomial) for the given side.
std::vector<BasisLabel> can_basis(const DescentContext& ctx, CanSide side);
PadicMatrix can_matrix(const DescentContext& ctx, CanSide side);
// Divided Frobenius phi_i from the Nygaard basis of F^{[1,in-1]} to the plain basis.
PadicMatrix phi_matrix(const DescentContext& ctx);

struct SyntomicSquare {
  PadicMatrix canPhi;       // can - phi_i
  PadicMatrix nygNabla;     // N^{>=i} nabla
  PadicMatrix nabla;        // nabla of the quotient
  PadicMatrix canPhiNabla;  // can - phi^nabla
};

struct Assembly {
  PadicMatrix syn0;  // 2m x m
  PadicMatrix syn1;  // m x 2m
  SyntomicSquare square;
  PadicMatrix canSource, canTarget, red, redNabla, nablaOK;
  unsigned valid = 0;
};

// Builds every map of the square and both differentials. Raises
// PrecisionExhausted when the final trusted digits fall below the target.
Assembly assemble(const DescentContext& ctx, const PrecisionPlan& plan);

struct Cohomology {
  std::vector<unsigned> h1;
  std::vector<unsigned> h2;
};

// Elementary-divisor extraction: H^1 from syn0 (which must be injective), H^2
// from syn1. Exponents are reported only when strictly below the tracked
// precision.
Cohomology cohomology(const PadicMatrix& syn0, const PadicMatrix& syn1, const PrecisionPlan& plan);

struct KGroupOptions {
  std::vector<mpz_class> eisenstein;  // non-constant coefficients low-to-high; empty means z + p
  unsigned precision = 0;             // 0 selects the planned working precision
  bool adaptive = false;              // double W and restart on PrecisionExhausted
  unsigned max_precision = 4096;      // adaptive restarts stop here
  std::vector<mpz_class> hLift;       // empty means the default minimal polynomial
};

struct PrecisionReport {
  unsigned target = 0;
  unsigned working = 0;
  unsigned valid = 0;
};

struct KGroupResult {
  unsigned p = 2;
  unsigned f = 1;
  int n = 1;
  int i = 1;
  std::vector<mpz_class> eisenstein;  // non-constant coefficients low-to-high
  std::vector<unsigned> h1;           // K_{2i-1} cyclic factor exponents
  std::vector<unsigned> h2;           // K_{2i-2} cyclic factor exponents
  PrecisionReport precision;
  double millis = 0.0;

  bool operator==(const KGroupResult& other) const;
};

KGroupResult kgroups(unsigned p, unsigned f, int n, int i, const KGroupOptions& options = {});

// Sum of h1 minus sum of h2 equals f * i * (n - 1).
bool angeltveit_check(const KGroupResult& result);

// First weight i for which K_{2i-2} of O_K/pi^n is certified to vanish.
long even_vanishing_threshold(unsigned p, int e, int n);

// Order of K_{2i-1}(O_K/pi^n) including the prime-to-p part q^i - 1.
mpz_class full_odd_order(const KGroupResult& result);

struct IsogenyCheck {
  std::string map;
  unsigned observed = 0;
  unsigned expected = 0;
};

// Elementary-divisor valuation sums of can, red, nabla_R and nabla_OK against
// their closed forms.
std::vector<IsogenyCheck> isogeny_checks(unsigned p, unsigned f, int n, int i, const KGroupOptions& options = {});

// Closed forms used by isogeny_checks.
unsigned expected_can_sum(unsigned p, unsigned f, int n, int i);
unsigned expected_red_sum(unsigned p, unsigned f, int n, int i);
unsigned expected_nablaR_sum(unsigned p, unsigned f, int n, int i);
unsigned expected_nablaOK_sum(unsigned p, unsigned f, int n, int i);
unsigned expected_nygaard_sum(unsigned p, unsigned f, int n, int i);

// Ring and Eisenstein polynomial for the given options.
WittRingPtr make_ring(unsigned p, unsigned f, unsigned W, const std::vector<mpz_class>& hLift);
std::vector<WittScalar> eisenstein_for(const WittRing& ring, const std::vector<mpz_class>& nonconstant);

}  // namespace kchain
