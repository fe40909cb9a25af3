// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "kchain/padic.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace kchain {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPrimeP: return "NonPrimeP";
    case ErrorCode::ReducibleMinimalPolynomial: return "ReducibleMinimalPolynomial";
    case ErrorCode::NonSeparable: return "NonSeparable";
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::NotDistinguished: return "NotDistinguished";
    case ErrorCode::NotEisenstein: return "NotEisenstein";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::BoundTooSmall: return "BoundTooSmall";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::NotIntegral: return "NotIntegral";
    case ErrorCode::SingularModPValid: return "SingularModPValid";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::H0Nonzero: return "H0Nonzero";
    case ErrorCode::CheckFailed: return "CheckFailed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void PrecisionLedger::lose(unsigned digits) {
  if (digits > valid) raise(ErrorCode::PrecisionExhausted, "ledger would drop below zero digits");
  valid -= digits;
}

bool is_prime(unsigned long n) {
  if (n < 2) return false;
  for (unsigned long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

unsigned vp(const mpz_class& v, unsigned p, unsigned cap) {
  if (v == 0) return cap;
  mpz_class t = v;
  unsigned k = 0;
  while (k < cap && mpz_divisible_ui_p(t.get_mpz_t(), p)) {
    mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
    ++k;
  }
  return k;
}

unsigned vp_factorial(unsigned long n, unsigned p) {
  unsigned s = 0;
  for (unsigned long q = p; q <= n; q *= p) {
    s += static_cast<unsigned>(n / q);
    if (q > n / p) break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Polynomials over F_p (coefficients low-to-high, trimmed).

namespace {

using PolyP = std::vector<long>;

void trim(PolyP& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

long mod_p(long v, long p) {
  v %= p;
  return v < 0 ? v + p : v;
}

long inv_mod_p(long a, long p) {
  long t = 0, nt = 1, r = p, nr = mod_p(a, p);
  while (nr != 0) {
    long q = r / nr;
    std::swap(t, nt);
    nt -= q * t;
    std::swap(r, nr);
    nr -= q * r;
  }
  return mod_p(t, p);
}

PolyP poly_mod(PolyP a, const PolyP& m, long p) {
  trim(a);
  const long lead_inv = inv_mod_p(m.back(), p);
  while (a.size() >= m.size()) {
    const long c = a.back() * lead_inv % p;
    const size_t shift = a.size() - m.size();
    for (size_t i = 0; i < m.size(); ++i) a[shift + i] = mod_p(a[shift + i] - c * m[i], p);
    trim(a);
  }
  return a;
}

PolyP poly_mulmod(const PolyP& a, const PolyP& b, const PolyP& m, long p) {
  if (a.empty() || b.empty()) return {};
  PolyP r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return poly_mod(std::move(r), m, p);
}

PolyP poly_powmod(PolyP base, unsigned long long e, const PolyP& m, long p) {
  PolyP result{1};
  base = poly_mod(std::move(base), m, p);
  while (e > 0) {
    if (e & 1ULL) result = poly_mulmod(result, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1ULL;
  }
  return result;
}

PolyP poly_gcd(PolyP a, PolyP b, long p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    PolyP r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

PolyP to_poly_p(const std::vector<mpz_class>& h, unsigned p) {
  PolyP out(h.size());
  for (size_t i = 0; i < h.size(); ++i) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), h[i].get_mpz_t(), p);
    out[i] = static_cast<long>(r.get_ui());
  }
  trim(out);
  return out;
}

// x^(p^k) mod m.
PolyP frobenius_power(unsigned k, const PolyP& m, long p) {
  PolyP r = poly_mod(PolyP{0, 1}, m, p);
  for (unsigned i = 0; i < k; ++i) r = poly_powmod(r, static_cast<unsigned long long>(p), m, p);
  return r;
}

PolyP sub_x(PolyP a, long p) {
  if (a.size() < 2) a.resize(2, 0);
  a[1] = mod_p(a[1] - 1, p);
  trim(a);
  return a;
}

}  // namespace

bool is_irreducible_mod_p(const std::vector<mpz_class>& h, unsigned p) {
  const PolyP m = to_poly_p(h, p);
  if (m.size() < 2) return false;
  const unsigned f = static_cast<unsigned>(m.size() - 1);
  if (f == 1) return true;
  // Separable: gcd(h, h') = 1.
  PolyP dm(m.size() - 1);
  for (size_t i = 1; i < m.size(); ++i) dm[i - 1] = static_cast<long>(i % p) * m[i] % static_cast<long>(p);
  trim(dm);
  if (dm.empty() || poly_gcd(m, dm, p).size() != 1) return false;
  if (!sub_x(frobenius_power(f, m, p), p).empty()) return false;
  for (unsigned r = 2; r <= f; ++r) {
    if (f % r != 0 || !is_prime(r)) continue;
    if (poly_gcd(m, sub_x(frobenius_power(f / r, m, p), p), p).size() != 1) return false;
  }
  return true;
}

std::vector<mpz_class> default_minimal_polynomial(unsigned p, unsigned f) {
  if (f == 1) return {mpz_class(0), mpz_class(1)};
  unsigned long long count = 1;
  for (unsigned i = 0; i < f; ++i) count *= p;
  for (unsigned long long t = 0; t < count; ++t) {
    std::vector<mpz_class> h(f + 1);
    unsigned long long v = t;
    for (unsigned i = 0; i < f; ++i) {
      h[i] = static_cast<unsigned long>(v % p);
      v /= p;
    }
    h[f] = 1;
    if (is_irreducible_mod_p(h, p)) return h;
  }
  raise(ErrorCode::ReducibleMinimalPolynomial, "no irreducible polynomial found");
}

// ---------------------------------------------------------------------------

WittRing::WittRing(RingParams params) : p_(params.p), f_(params.f), W_(params.W) {
  if (!is_prime(p_)) raise(ErrorCode::NonPrimeP, "p = " + std::to_string(p_) + " is not prime");
  if (f_ < 1) raise(ErrorCode::InvalidArgument, "residue degree must be >= 1");
  if (W_ < 1) raise(ErrorCode::InvalidArgument, "working precision must be >= 1");
  ppow_.resize(W_ + 1);
  ppow_[0] = 1;
  for (unsigned k = 1; k <= W_; ++k) ppow_[k] = ppow_[k - 1] * p_;
  pW_ = ppow_[W_];

  h_ = params.hLift.empty() ? default_minimal_polynomial(p_, f_) : params.hLift;
  if (h_.size() != f_ + 1 || h_.back() != 1)
    raise(ErrorCode::ReducibleMinimalPolynomial, "hLift must be monic of degree f");
  for (auto& c : h_) {
    c %= pW_;
    if (c < 0) c += pW_;
  }
  if (!is_irreducible_mod_p(h_, p_))
    raise(ErrorCode::ReducibleMinimalPolynomial, "hLift is not irreducible and separable mod p");

  // Newton iteration for the root of hLift congruent to x^p.
  WittScalar r = pow(x(), p_);
  if (f_ > 1) {
    auto eval = [&](const WittScalar& at, bool derivative) {
      WittScalar acc = zero();
      for (size_t k = h_.size(); k-- > 0;) {
        if (derivative && k == 0) break;
        acc = mul(acc, at);
        const mpz_class coef = derivative ? h_[k] * static_cast<unsigned long>(k) : h_[k];
        acc = add(acc, from_int(coef));
      }
      return acc;
    };
    for (unsigned iter = 0; iter < 2 * W_ + 8; ++iter) {
      const WittScalar hv = eval(r, false);
      if (is_zero(hv)) break;
      const WittScalar dv = eval(r, true);
      if (!is_unit(dv)) raise(ErrorCode::NonSeparable, "derivative of hLift vanishes at x^p mod p");
      r = sub(r, mul(hv, invert_unit(dv)));
    }
    if (!is_zero(eval(r, false))) raise(ErrorCode::NonConvergent, "Newton iteration for sigma(x)");
  }
  sigma_x_ = r;
  sigma_cols_.reserve(f_);
  WittScalar pw = one();
  for (unsigned d = 0; d < f_; ++d) {
    sigma_cols_.push_back(pw);
    pw = mul(pw, sigma_x_);
  }
}

const mpz_class& WittRing::p_power(unsigned k) const {
  if (k > W_) raise(ErrorCode::InvalidArgument, "p-power beyond working precision");
  return ppow_[k];
}

WittScalar WittRing::zero() const { return WittScalar{std::vector<mpz_class>(f_, 0)}; }

WittScalar WittRing::one() const {
  WittScalar s = zero();
  s.c[0] = pW_ == 1 ? 0 : 1;
  return s;
}

WittScalar WittRing::x() const {
  if (f_ == 1) {
    // hLift = x - c, so x = c.
    WittScalar s = zero();
    s.c[0] = -h_[0];
    reduce(s.c.data());
    return s;
  }
  WittScalar s = zero();
  s.c[1] = 1;
  return s;
}

WittScalar WittRing::prime() const { return from_int(p_); }

WittScalar WittRing::from_int(const mpz_class& v) const {
  WittScalar s = zero();
  s.c[0] = v;
  reduce(s.c.data());
  return s;
}

WittScalar WittRing::add(const WittScalar& a, const WittScalar& b) const {
  WittScalar s = zero();
  for (unsigned i = 0; i < f_; ++i) s.c[i] = a.c[i] + b.c[i];
  reduce(s.c.data());
  return s;
}

WittScalar WittRing::sub(const WittScalar& a, const WittScalar& b) const {
  WittScalar s = zero();
  for (unsigned i = 0; i < f_; ++i) s.c[i] = a.c[i] - b.c[i];
  reduce(s.c.data());
  return s;
}

WittScalar WittRing::neg(const WittScalar& a) const {
  WittScalar s = zero();
  for (unsigned i = 0; i < f_; ++i) s.c[i] = -a.c[i];
  reduce(s.c.data());
  return s;
}

WittScalar WittRing::mul(const WittScalar& a, const WittScalar& b) const {
  WittScalar s = zero();
  mul_into(s.c.data(), a.c.data(), b.c.data());
  return s;
}

WittScalar WittRing::pow(const WittScalar& a, unsigned long e) const {
  WittScalar result = one();
  WittScalar base = a;
  while (e > 0) {
    if (e & 1UL) result = mul(result, base);
    base = mul(base, base);
    e >>= 1UL;
  }
  return result;
}

bool WittRing::is_zero(const WittScalar& a) const {
  return std::all_of(a.c.begin(), a.c.end(), [](const mpz_class& v) { return v == 0; });
}

unsigned WittRing::valuation(const WittScalar& s) const { return valuation(s.c.data()); }

unsigned WittRing::valuation(const mpz_class* a) const {
  unsigned v = W_;
  for (unsigned i = 0; i < f_; ++i) v = std::min(v, vp(a[i], p_, W_));
  return v;
}

WittScalar WittRing::invert_unit(const WittScalar& s) const {
  if (valuation(s) != 0) raise(ErrorCode::NotAUnit, "element is divisible by p");
  if (f_ == 1) {
    WittScalar t = zero();
    mpz_invert(t.c[0].get_mpz_t(), s.c[0].get_mpz_t(), pW_.get_mpz_t());
    return t;
  }
  // s^(q-2) inverts s modulo p; Newton doubling lifts it to p^W.
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), p_, f_);
  WittScalar t = one();
  {
    WittScalar base = s;
    mpz_class e = q - 2;
    while (e > 0) {
      if (mpz_odd_p(e.get_mpz_t())) t = mul(t, base);
      base = mul(base, base);
      e >>= 1;
    }
  }
  const WittScalar two = from_int(2);
  for (unsigned iter = 0; iter < 64; ++iter) {
    const WittScalar st = mul(s, t);
    if (st == one()) return t;
    t = mul(t, sub(two, st));
  }
  raise(ErrorCode::NonConvergent, "unit inversion did not converge");
}

WittScalar WittRing::exact_divide_p(const WittScalar& s, PrecisionLedger& ledger) const {
  if (ledger.valid == 0) raise(ErrorCode::PrecisionExhausted, "division by p with no trusted digits");
  WittScalar out = zero();
  for (unsigned i = 0; i < f_; ++i) {
    if (!mpz_divisible_ui_p(s.c[i].get_mpz_t(), p_))
      raise(ErrorCode::NotDivisible, "element is not divisible by p");
    mpz_divexact_ui(out.c[i].get_mpz_t(), s.c[i].get_mpz_t(), p_);
  }
  ledger.lose(1);
  return out;
}

WittScalar WittRing::sigma(const WittScalar& s) const {
  WittScalar out = zero();
  sigma_into(out.c.data(), s.c.data());
  return out;
}

void WittRing::sigma_into(mpz_class* dst, const mpz_class* a) const {
  if (f_ == 1) {
    dst[0] = a[0];
    return;
  }
  std::vector<mpz_class> acc(f_, 0);
  for (unsigned d = 0; d < f_; ++d) {
    if (a[d] == 0) continue;
    for (unsigned t = 0; t < f_; ++t) mpz_addmul(acc[t].get_mpz_t(), a[d].get_mpz_t(), sigma_cols_[d].c[t].get_mpz_t());
  }
  for (unsigned t = 0; t < f_; ++t) dst[t] = std::move(acc[t]);
  reduce(dst);
}

void WittRing::reduce(mpz_class* a) const {
  for (unsigned i = 0; i < f_; ++i) mpz_fdiv_r(a[i].get_mpz_t(), a[i].get_mpz_t(), pW_.get_mpz_t());
}

void WittRing::poly_mul_reduce(std::vector<mpz_class>& out, const mpz_class* a, const mpz_class* b) const {
  out.assign(2 * f_ - 1, 0);
  for (unsigned i = 0; i < f_; ++i) {
    if (a[i] == 0) continue;
    for (unsigned j = 0; j < f_; ++j) mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
  }
  for (size_t k = out.size(); k-- > f_;) {
    if (out[k] == 0) continue;
    const size_t shift = k - f_;
    for (unsigned t = 0; t < f_; ++t) mpz_submul(out[shift + t].get_mpz_t(), out[k].get_mpz_t(), h_[t].get_mpz_t());
    out[k] = 0;
  }
  out.resize(f_);
}

void WittRing::mul_into(mpz_class* dst, const mpz_class* a, const mpz_class* b) const {
  if (f_ == 1) {
    mpz_mul(dst[0].get_mpz_t(), a[0].get_mpz_t(), b[0].get_mpz_t());
    mpz_fdiv_r(dst[0].get_mpz_t(), dst[0].get_mpz_t(), pW_.get_mpz_t());
    return;
  }
  std::vector<mpz_class> tmp;
  poly_mul_reduce(tmp, a, b);
  for (unsigned t = 0; t < f_; ++t) dst[t] = std::move(tmp[t]);
  reduce(dst);
}

void WittRing::addmul(mpz_class* dst, const mpz_class* a, const mpz_class* b) const {
  if (f_ == 1) {
    mpz_addmul(dst[0].get_mpz_t(), a[0].get_mpz_t(), b[0].get_mpz_t());
    return;
  }
  std::vector<mpz_class> tmp;
  poly_mul_reduce(tmp, a, b);
  for (unsigned t = 0; t < f_; ++t) dst[t] += tmp[t];
}

WittScalar WittRing::x_power(unsigned d) const {
  WittScalar s = one();
  for (unsigned i = 0; i < d; ++i) s = mul(s, x());
  return s;
}

WittRingPtr init_ring(RingParams params) { return std::make_shared<const WittRing>(std::move(params)); }

}  // namespace kchain
