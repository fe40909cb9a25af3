// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "kchain/envelope.hpp"

#include <algorithm>
#include <mutex>
#include <string>
#include <utility>

namespace kchain {

namespace {

// Binomial coefficient C(p, j) / p for 1 <= j < p, an integer.
mpz_class binom_over_p(unsigned p, unsigned j) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), p, j);
  mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), p);
  return c;
}

std::vector<int> digits_base_p(long m, unsigned p, int slots) {
  std::vector<int> out(static_cast<std::size_t>(slots), 0);
  int u = 0;
  while (m > 0) {
    if (u >= slots) raise(ErrorCode::InvalidArgument, "generator index beyond envelope slots");
    out[static_cast<std::size_t>(u)] = static_cast<int>(m % p);
    m /= p;
    ++u;
  }
  return out;
}

thread_local int g_nf_depth = 0;

struct DepthGuard {
  explicit DepthGuard(int cap) {
    if (++g_nf_depth > cap) {
      g_nf_depth = 0;
      raise(ErrorCode::NonConvergent, "reduce exceeded its rewriting depth");
    }
  }
  ~DepthGuard() {
    if (g_nf_depth > 0) --g_nf_depth;
  }
};

}  // namespace

bool Monomial::operator==(const Monomial& other) const {
  if (k != other.k) return false;
  const std::size_t n = std::max(exps.size(), other.exps.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int a = i < exps.size() ? exps[i] : 0;
    const int b = i < other.exps.size() ? other.exps[i] : 0;
    if (a != b) return false;
  }
  return true;
}

std::vector<WittScalar> make_eisenstein(const WittRing& ring, const std::vector<mpz_class>& nonconstant) {
  std::vector<WittScalar> E;
  E.push_back(ring.prime());
  for (const auto& c : nonconstant) E.push_back(ring.from_int(c));
  validate_eisenstein(ring, E);
  return E;
}

void validate_eisenstein(const WittRing& ring, const std::vector<WittScalar>& E) {
  if (E.size() < 2) raise(ErrorCode::NotEisenstein, "degree must be at least 1");
  if (!(E[0] == ring.prime())) raise(ErrorCode::NotEisenstein, "constant term must equal p");
  for (std::size_t k = 1; k + 1 < E.size(); ++k)
    if (ring.valuation(E[k]) < 1) raise(ErrorCode::NotEisenstein, "middle coefficients must be divisible by p");
  if (!ring.is_unit(E.back())) raise(ErrorCode::NotEisenstein, "leading coefficient must be a unit");
}

int generator_bound(unsigned p, int genw, int B) {
  int M = 0;
  long long w = static_cast<long long>(genw) * p;
  while (w <= B) {
    ++M;
    w *= p;
  }
  return M;
}

// ---------------------------------------------------------------------------

Envelope::Envelope(EnvelopeSpec spec) : spec_(std::move(spec)), f_(spec_.ring->f()) {
  if (spec_.B < 0) raise(ErrorCode::InvalidArgument, "truncation bound must be >= 0");
  if (spec_.e < 1 || static_cast<int>(spec_.E.size()) != spec_.e + 1)
    raise(ErrorCode::NotEisenstein, "Eisenstein polynomial must have degree e");
  validate_eisenstein(*spec_.ring, spec_.E);
  const unsigned p = spec_.ring->p();
  const int B = spec_.B;
  switch (spec_.kind) {
    case EnvelopeKind::QuotientOneVar:
      if (spec_.n < 1) raise(ErrorCode::InvalidArgument, "quotient exponent must be >= 1");
      genw_ = spec_.n;
      break;
    case EnvelopeKind::OKTwoVar:
      genw_ = 1;
      break;
    case EnvelopeKind::OKOneVar:
      genw_ = 0;
      break;
  }
  if (genw_ > 0) {
    M_ = generator_bound(p, genw_, B);
    G_ = M_ + 2;
  } else {
    M_ = -1;
    G_ = 0;
  }
  if (G_ > 14) raise(ErrorCode::InvalidArgument, "truncation bound too large for monomial packing");
  if (B > 60000) raise(ErrorCode::InvalidArgument, "truncation bound too large");

  weight_start_.assign(static_cast<std::size_t>(B) + 2, 0);
  for (int w = 0; w <= B; ++w) {
    weight_start_[static_cast<std::size_t>(w)] = static_cast<int>(monos_.size());
    switch (spec_.kind) {
      case EnvelopeKind::QuotientOneVar: {
        const int n = spec_.n;
        monos_.push_back(Monomial{w % n, digits_base_p(w / n, p, G_)});
        break;
      }
      case EnvelopeKind::OKOneVar:
        monos_.push_back(Monomial{w, {}});
        break;
      case EnvelopeKind::OKTwoVar:
        for (int k = 0; k <= w; ++k) monos_.push_back(Monomial{k, digits_base_p(w - k, p, G_)});
        break;
    }
    while (weights_.size() < monos_.size()) weights_.push_back(w);
  }
  weight_start_[static_cast<std::size_t>(B) + 1] = static_cast<int>(monos_.size());

  relations_.resize(static_cast<std::size_t>(std::max(G_, 0)));
  has_relation_.assign(relations_.size(), false);
  gen_images_.resize(relations_.size());
  has_image_.assign(relations_.size(), false);

  const std::size_t N = monos_.size();
  if (N <= 2048) pair_cache_.assign(N * N, nullptr);
}

int Envelope::weight(const Monomial& m) const {
  long long w = m.k;
  long long pu = genw_;
  const unsigned p = spec_.ring->p();
  for (int e : m.exps) {
    w += pu * e;
    pu *= p;
    if (w > (1LL << 40)) break;
  }
  return w > (1LL << 30) ? (1 << 30) : static_cast<int>(w);
}

bool Envelope::admissible(const Monomial& m) const {
  const int p = static_cast<int>(spec_.ring->p());
  if (spec_.kind == EnvelopeKind::QuotientOneVar && m.k >= spec_.n) return false;
  if (static_cast<int>(m.exps.size()) > G_) {
    for (std::size_t u = static_cast<std::size_t>(G_); u < m.exps.size(); ++u)
      if (m.exps[u] != 0) return false;
  }
  return std::all_of(m.exps.begin(), m.exps.end(), [p](int e) { return e >= 0 && e < p; }) && m.k >= 0;
}

long Envelope::index_of(const Monomial& m) const {
  if (!admissible(m)) return -1;
  const int w = weight(m);
  if (w > spec_.B) return -1;
  switch (spec_.kind) {
    case EnvelopeKind::QuotientOneVar:
    case EnvelopeKind::OKOneVar:
      return w;
    case EnvelopeKind::OKTwoVar:
      return weight_start_[static_cast<std::size_t>(w)] + m.k;
  }
  return -1;
}

Element Envelope::basis(std::size_t idx) const {
  Element a = zero();
  a[idx * f_] = 1;
  return a;
}

Element Envelope::constant(const WittScalar& c) const {
  Element a = zero();
  for (unsigned t = 0; t < f_; ++t) a[t] = c.c[t];
  return a;
}

bool Envelope::is_zero(const Element& a) const {
  return std::all_of(a.begin(), a.end(), [](const mpz_class& v) { return v == 0; });
}

WittScalar Envelope::coefficient(const Element& a, std::size_t idx) const {
  WittScalar s = ring().zero();
  for (unsigned t = 0; t < f_; ++t) s.c[t] = a[idx * f_ + t];
  return s;
}

void Envelope::set_coefficient(Element& a, std::size_t idx, const WittScalar& c) const {
  for (unsigned t = 0; t < f_; ++t) a[idx * f_ + t] = c.c[t];
}

void Envelope::normalize(Element& a) const {
  const mpz_class& m = ring().modulus();
  for (auto& v : a) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
}

Element Envelope::add(const Element& a, const Element& b) const {
  Element r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  normalize(r);
  return r;
}

Element Envelope::sub(const Element& a, const Element& b) const {
  Element r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  normalize(r);
  return r;
}

Element Envelope::neg(const Element& a) const {
  Element r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  normalize(r);
  return r;
}

Element Envelope::scale(const Element& a, const WittScalar& c) const {
  Element r = zero();
  for (std::size_t i = 0; i < size(); ++i) ring().mul_into(&r[i * f_], &a[i * f_], c.c.data());
  return r;
}

Envelope::Key Envelope::pack(const Monomial& m) const {
  if (m.k < 0 || m.k > 65535) raise(ErrorCode::InvalidArgument, "z0 exponent out of packing range");
  Key key;
  key.lo = static_cast<std::uint64_t>(m.k);
  for (std::size_t u = 0; u < m.exps.size(); ++u) {
    const int e = m.exps[u];
    if (e == 0) continue;
    if (e < 0 || e > 255 || u >= 14) raise(ErrorCode::InvalidArgument, "generator exponent out of packing range");
    if (u < 6)
      key.lo |= static_cast<std::uint64_t>(e) << (16 + 8 * u);
    else
      key.hi |= static_cast<std::uint64_t>(e) << (8 * (u - 6));
  }
  return key;
}

std::size_t Envelope::KeyHash::operator()(const Key& k) const noexcept {
  return std::hash<std::uint64_t>{}(k.lo ^ (k.hi * 0x9e3779b97f4a7c15ULL));
}

void Envelope::accumulate(mpz_class* dst, const mpz_class* scalar, const SparseElement& nf) const {
  for (std::size_t t = 0; t < nf.idx.size(); ++t)
    ring().addmul(dst + static_cast<std::size_t>(nf.idx[t]) * f_, scalar, &nf.coef[t * f_]);
}

const SparseElement& Envelope::normal_form(const Monomial& raw) const {
  static const SparseElement kEmpty{};
  if (weight(raw) > spec_.B) return kEmpty;
  const Key key = pack(raw);
  {
    std::shared_lock lock(memo_mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  SparseElement nf = compute_normal_form(raw);
  std::unique_lock lock(memo_mutex_);
  auto [it, inserted] = memo_.emplace(key, std::move(nf));
  return it->second;
}

SparseElement Envelope::compute_normal_form(const Monomial& raw) const {
  const int cap = (spec_.B + 2) * (static_cast<int>(ring().W()) + 2) * (G_ + 1) + 64;
  DepthGuard guard(cap);
  const int p = static_cast<int>(ring().p());

  Monomial m = raw;
  if (static_cast<int>(m.exps.size()) < G_) m.exps.resize(static_cast<std::size_t>(G_), 0);

  if (spec_.kind == EnvelopeKind::QuotientOneVar && m.k >= spec_.n) {
    // z0^n = f_0.
    Monomial next = m;
    next.k -= spec_.n;
    next.exps[0] += 1;
    return normal_form(next);
  }

  int bad = -1;
  for (std::size_t u = 0; u < m.exps.size(); ++u) {
    if (m.exps[u] >= p) {
      bad = static_cast<int>(u);
      break;
    }
  }
  if (bad < 0) {
    const long idx = index_of(m);
    if (idx < 0) raise(ErrorCode::InvalidArgument, "monomial has no basis index");
    SparseElement out;
    out.idx.push_back(static_cast<std::uint32_t>(idx));
    out.coef.assign(f_, 0);
    out.coef[0] = 1;
    return out;
  }
  if (bad >= G_ || !has_relation_[static_cast<std::size_t>(bad)])
    raise(ErrorCode::NonConvergent, "pth-power relation for generator " + std::to_string(bad) + " is not available");

  Monomial base = m;
  base.exps[static_cast<std::size_t>(bad)] -= p;
  const int wbase = weight(base);
  Element acc = zero();
  bool any = false;
  for (const RawTerm& term : relations_[static_cast<std::size_t>(bad)]) {
    if (wbase + weight(term.mono) > spec_.B) continue;
    Monomial prod = base;
    prod.k += term.mono.k;
    for (std::size_t u = 0; u < term.mono.exps.size(); ++u) prod.exps[u] += term.mono.exps[u];
    const SparseElement& nf = normal_form(prod);
    if (nf.idx.empty()) continue;
    accumulate(acc.data(), term.coef.c.data(), nf);
    any = true;
  }
  SparseElement out;
  if (!any) return out;
  normalize(acc);
  for (std::size_t i = 0; i < size(); ++i) {
    bool nz = false;
    for (unsigned t = 0; t < f_; ++t) nz = nz || acc[i * f_ + t] != 0;
    if (!nz) continue;
    out.idx.push_back(static_cast<std::uint32_t>(i));
    for (unsigned t = 0; t < f_; ++t) out.coef.push_back(std::move(acc[i * f_ + t]));
  }
  return out;
}

const SparseElement& Envelope::pair_product(std::size_t i, std::size_t j) const {
  const std::size_t N = size();
  const SparseElement* cached = nullptr;
  if (!pair_cache_.empty()) {
    std::shared_lock lock(memo_mutex_);
    cached = pair_cache_[i * N + j];
  }
  if (cached != nullptr) return *cached;
  const Monomial& a = monos_[i];
  const Monomial& b = monos_[j];
  Monomial prod{a.k + b.k, std::vector<int>(static_cast<std::size_t>(G_), 0)};
  for (std::size_t u = 0; u < a.exps.size(); ++u) prod.exps[u] += a.exps[u];
  for (std::size_t u = 0; u < b.exps.size(); ++u) prod.exps[u] += b.exps[u];
  const SparseElement& nf = normal_form(prod);
  if (!pair_cache_.empty()) {
    std::unique_lock lock(memo_mutex_);
    pair_cache_[i * N + j] = &nf;
    pair_cache_[j * N + i] = &nf;
  }
  return nf;
}

Element Envelope::mul(const Element& a, const Element& b) const {
  std::vector<std::size_t> ia, ib;
  for (std::size_t i = 0; i < size(); ++i) {
    bool na = false, nb = false;
    for (unsigned t = 0; t < f_; ++t) {
      na = na || a[i * f_ + t] != 0;
      nb = nb || b[i * f_ + t] != 0;
    }
    if (na) ia.push_back(i);
    if (nb) ib.push_back(i);
  }
  Element out = zero();
  std::vector<mpz_class> t(f_);
  for (std::size_t i : ia) {
    const int wi = weights_[i];
    for (std::size_t j : ib) {
      if (wi + weights_[j] > spec_.B) break;
      const SparseElement& nf = pair_product(i, j);
      if (nf.idx.empty()) continue;
      ring().mul_into(t.data(), &a[i * f_], &b[j * f_]);
      accumulate(out.data(), t.data(), nf);
    }
  }
  normalize(out);
  return out;
}

Element Envelope::pow(const Element& a, unsigned long e) const {
  Element result = constant(ring().one());
  Element base = a;
  while (e > 0) {
    if (e & 1UL) result = mul(result, base);
    e >>= 1UL;
    if (e > 0) base = mul(base, base);
  }
  return result;
}

Element Envelope::reduce(const Monomial& raw, const WittScalar& c) const {
  Element out = zero();
  accumulate(out.data(), c.c.data(), normal_form(raw));
  normalize(out);
  return out;
}

Element Envelope::reduce(const std::vector<RawTerm>& raw) const {
  Element out = zero();
  for (const RawTerm& t : raw) accumulate(out.data(), t.coef.c.data(), normal_form(t.mono));
  normalize(out);
  return out;
}

Element Envelope::z_power(int k) const {
  return reduce(Monomial{k, std::vector<int>(static_cast<std::size_t>(G_), 0)}, ring().one());
}

Element Envelope::from_series(const Element& series, const Envelope& series_env) const {
  if (series_env.kind() != EnvelopeKind::OKOneVar) raise(ErrorCode::BasisMismatch, "series must live in W[[z0]]");
  Element out = zero();
  const int top = std::min(spec_.B, series_env.B());
  for (int k = 0; k <= top; ++k) {
    const mpz_class* c = &series[static_cast<std::size_t>(k) * f_];
    bool nz = false;
    for (unsigned t = 0; t < f_; ++t) nz = nz || c[t] != 0;
    if (!nz) continue;
    accumulate(out.data(), c, normal_form(Monomial{k, std::vector<int>(static_cast<std::size_t>(G_), 0)}));
  }
  normalize(out);
  return out;
}

Element Envelope::to_series(const Element& a) const {
  Element out(static_cast<std::size_t>(spec_.B + 1) * f_, 0);
  for (int k = 0; k <= spec_.B; ++k) {
    const long idx = index_of(Monomial{k, std::vector<int>(static_cast<std::size_t>(G_), 0)});
    if (idx < 0) continue;
    for (unsigned t = 0; t < f_; ++t) out[static_cast<std::size_t>(k) * f_ + t] = a[static_cast<std::size_t>(idx) * f_ + t];
  }
  return out;
}

Element Envelope::series_inverse(const Element& a) const {
  if (spec_.kind != EnvelopeKind::OKOneVar) raise(ErrorCode::BasisMismatch, "series inverse needs W[[z0]]");
  const WittScalar b0 = ring().invert_unit(coefficient(a, 0));
  const WittScalar minus_b0 = ring().neg(b0);
  Element b = zero();
  set_coefficient(b, 0, b0);
  std::vector<mpz_class> acc(f_);
  for (int k = 1; k <= spec_.B; ++k) {
    for (auto& v : acc) v = 0;
    for (int j = 1; j <= k; ++j)
      ring().addmul(acc.data(), &a[static_cast<std::size_t>(j) * f_], &b[static_cast<std::size_t>(k - j) * f_]);
    ring().reduce(acc.data());
    ring().mul_into(&b[static_cast<std::size_t>(k) * f_], acc.data(), minus_b0.c.data());
  }
  return b;
}

void Envelope::set_relation(int u, std::vector<RawTerm> terms) {
  if (u < 0 || u >= G_) raise(ErrorCode::InvalidArgument, "relation index out of range");
  for (auto& t : terms)
    if (static_cast<int>(t.mono.exps.size()) < G_) t.mono.exps.resize(static_cast<std::size_t>(G_), 0);
  relations_[static_cast<std::size_t>(u)] = std::move(terms);
  has_relation_[static_cast<std::size_t>(u)] = true;
}

bool Envelope::has_relation(int u) const {
  return u >= 0 && u < G_ && has_relation_[static_cast<std::size_t>(u)];
}

const std::vector<RawTerm>& Envelope::relation(int u) const {
  if (!has_relation(u)) raise(ErrorCode::InvalidArgument, "no relation for generator " + std::to_string(u));
  return relations_[static_cast<std::size_t>(u)];
}

void Envelope::set_generator_image(int u, Element image) {
  if (u < 0 || u >= G_) raise(ErrorCode::InvalidArgument, "generator index out of range");
  gen_images_[static_cast<std::size_t>(u)] = std::move(image);
  has_image_[static_cast<std::size_t>(u)] = true;
}

const Element& Envelope::phi_monomial(std::size_t idx) const {
  {
    std::shared_lock lock(memo_mutex_);
    auto it = phi_cache_.find(idx);
    if (it != phi_cache_.end()) return it->second;
  }
  const unsigned p = ring().p();
  const Monomial& m = monos_[idx];
  Element r;
  if (static_cast<long long>(weights_[idx]) * p > spec_.B) {
    r = zero();
  } else {
    r = z_power(static_cast<int>(p) * m.k);
    for (std::size_t u = 0; u < m.exps.size(); ++u) {
      if (m.exps[u] == 0) continue;
      if (!has_image_[u]) raise(ErrorCode::InvalidArgument, "Frobenius image of generator " + std::to_string(u) + " missing");
      r = mul(r, pow(gen_images_[u], static_cast<unsigned long>(m.exps[u])));
    }
  }
  std::unique_lock lock(memo_mutex_);
  auto [it, inserted] = phi_cache_.emplace(idx, std::move(r));
  return it->second;
}

Element Envelope::phi(const Element& a) const {
  Element out = zero();
  std::vector<mpz_class> s(f_);
  for (std::size_t i = 0; i < size(); ++i) {
    bool nz = false;
    for (unsigned t = 0; t < f_; ++t) nz = nz || a[i * f_ + t] != 0;
    if (!nz) continue;
    const Element& img = phi_monomial(i);
    ring().sigma_into(s.data(), &a[i * f_]);
    for (std::size_t j = 0; j < size(); ++j) {
      bool nzj = false;
      for (unsigned t = 0; t < f_; ++t) nzj = nzj || img[j * f_ + t] != 0;
      if (nzj) ring().addmul(&out[j * f_], s.data(), &img[j * f_]);
    }
  }
  normalize(out);
  return out;
}

Element Envelope::delta(const Element& a, PrecisionLedger& ledger) const {
  if (ledger.valid < 1) raise(ErrorCode::PrecisionExhausted, "delta needs at least one trusted digit");
  Element diff = sub(phi(a), pow(a, ring().p()));
  const unsigned p = ring().p();
  for (auto& v : diff) {
    if (!mpz_divisible_ui_p(v.get_mpz_t(), p)) raise(ErrorCode::NotDivisible, "phi(x) - x^p is not divisible by p");
    mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), p);
  }
  ledger.lose(1);
  return diff;
}

Element w1(const Envelope& env, const Element& x, const Element& y) {
  const unsigned p = env.ring().p();
  std::vector<Element> xp{env.constant(env.ring().one())}, yp{env.constant(env.ring().one())};
  for (unsigned j = 1; j < p; ++j) {
    xp.push_back(env.mul(xp.back(), x));
    yp.push_back(env.mul(yp.back(), y));
  }
  Element acc = env.zero();
  for (unsigned j = 1; j < p; ++j) {
    const WittScalar c = env.ring().from_int(-binom_over_p(p, j));
    acc = env.add(acc, env.scale(env.mul(xp[j], yp[p - j]), c));
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Relation tables.

namespace {

Element series_of_E(const Envelope& okOne) {
  Element d = okOne.zero();
  const auto& E = okOne.spec().E;
  for (std::size_t k = 0; k < E.size() && static_cast<int>(k) <= okOne.B(); ++k) okOne.set_coefficient(d, k, E[k]);
  return d;
}

unsigned long ipow(unsigned long b, int e) {
  unsigned long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

Monomial generator_monomial(int slots, int u, int k = 0) {
  Monomial m{k, std::vector<int>(static_cast<std::size_t>(slots), 0)};
  if (u < slots) m.exps[static_cast<std::size_t>(u)] = 1;
  return m;
}

// Element lambda_u * gen_{u+1} in env (zero when gen_{u+1} has weight > B).
Element lambda_times_generator(const Envelope& env, const Envelope& okOne, const Element& lambda, int u) {
  std::vector<RawTerm> terms;
  for (int k = 0; k <= std::min(env.B(), okOne.B()); ++k) {
    WittScalar c = okOne.coefficient(lambda, static_cast<std::size_t>(k));
    if (env.ring().is_zero(c)) continue;
    terms.push_back(RawTerm{std::move(c), generator_monomial(env.generator_slots(), u + 1, k)});
  }
  return env.reduce(terms);
}

}  // namespace

std::vector<Element> build_lambda(const Envelope& okOne, int U_max, PrecisionLedger& ledger) {
  if (okOne.kind() != EnvelopeKind::OKOneVar) raise(ErrorCode::BasisMismatch, "lambda lives in W[[z0]]");
  const unsigned p = okOne.ring().p();
  const Element d = series_of_E(okOne);
  const Element dd = okOne.delta(d, ledger);
  if (!okOne.ring().is_unit(okOne.coefficient(dd, 0)))
    raise(ErrorCode::NotDistinguished, "delta(E(z0)) is not a unit");
  std::vector<Element> lambda;
  lambda.push_back(okOne.neg(okOne.series_inverse(dd)));
  for (int u = 0; u < U_max; ++u) {
    const Element dpow = okOne.pow(d, ipow(p, u + 1));
    const Element t = okOne.delta(okOne.mul(dpow, lambda.back()), ledger);
    const Element denom = okOne.sub(okOne.constant(okOne.ring().one()), t);
    lambda.push_back(okOne.mul(okOne.pow(lambda.back(), p), okOne.series_inverse(denom)));
  }
  return lambda;
}

RelationTables build_f_tables(Envelope& quotient, const Envelope& okOne, const std::vector<Element>& lambda,
                              const PrecisionLedger& lambda_ledger) {
  if (quotient.kind() != EnvelopeKind::QuotientOneVar) raise(ErrorCode::BasisMismatch, "f-tables need the quotient");
  const unsigned p = quotient.ring().p();
  const int n = quotient.spec().n;
  const int M = quotient.max_generator();
  if (static_cast<int>(lambda.size()) < M + 1) raise(ErrorCode::InvalidArgument, "not enough lambda levels");
  RelationTables tables;
  tables.M = M;
  tables.lambda.assign(lambda.begin(), lambda.begin() + M + 1);
  tables.ledger.valid = lambda_ledger.valid + static_cast<unsigned>(static_cast<int>(lambda.size()) - 1 - M);
  const Element d = series_of_E(okOne);
  const WittScalar minus_p = quotient.ring().neg(quotient.ring().prime());
  for (int u = 0; u <= M; ++u) {
    const unsigned long pu1 = ipow(p, u + 1);
    Element S = okOne.mul(lambda[static_cast<std::size_t>(u)], okOne.pow(d, pu1));
    okOne.set_coefficient(S, 0, quotient.ring().add(okOne.coefficient(S, 0), minus_p));
    std::vector<RawTerm> terms;
    const long long wgen = static_cast<long long>(n) * static_cast<long long>(pu1);
    for (int k = 0; k <= okOne.B() && k + wgen <= quotient.B(); ++k) {
      WittScalar c = okOne.coefficient(S, static_cast<std::size_t>(k));
      if (quotient.ring().is_zero(c)) continue;
      terms.push_back(RawTerm{std::move(c), generator_monomial(quotient.generator_slots(), u + 1, k)});
    }
    quotient.set_relation(u, std::move(terms));
  }
  for (int u = 0; u <= M; ++u) {
    Element img = lambda_times_generator(quotient, okOne, lambda[static_cast<std::size_t>(u)], u);
    tables.rprime.push_back(quotient.zero());
    tables.phiDivided.push_back(img);
    quotient.set_generator_image(u, std::move(img));
  }
  quotient.set_generator_image(M + 1, quotient.zero());
  return tables;
}

RelationTables build_g_tables(Envelope& twoVar, const Envelope& okOne, const std::vector<Element>& lambda,
                              const PrecisionLedger& lambda_ledger) {
  if (twoVar.kind() != EnvelopeKind::OKTwoVar) raise(ErrorCode::BasisMismatch, "g-tables need the two-variable envelope");
  const WittRing& ring = twoVar.ring();
  const unsigned p = ring.p();
  const int M = twoVar.max_generator();
  const int slots = twoVar.generator_slots();
  if (static_cast<int>(lambda.size()) < M + 1) raise(ErrorCode::InvalidArgument, "not enough lambda levels");
  RelationTables tables;
  tables.M = M;
  tables.lambda.assign(lambda.begin(), lambda.begin() + M + 1);
  // R'_u and lambda_u both carry W - 1 - u digits.
  tables.ledger.valid = lambda_ledger.valid + static_cast<unsigned>(static_cast<int>(lambda.size()) - 1 - M);
  PrecisionLedger work;
  work.valid = ring.W() - 1;

  const Element d = series_of_E(okOne);
  const Element phi_d = okOne.phi(d);

  // R'_0 = delta(z1 - z0) / delta(d) = -lambda_0 * sum_j (C(p,j)/p) z0^{p-j} g0^j.
  std::vector<RawTerm> r0;
  for (unsigned j = 1; j < p; ++j) {
    Monomial m{static_cast<int>(p - j), std::vector<int>(static_cast<std::size_t>(slots), 0)};
    m.exps[0] = static_cast<int>(j);
    r0.push_back(RawTerm{ring.from_int(binom_over_p(p, j)), m});
  }
  Element rprime = twoVar.neg(twoVar.mul(twoVar.from_series(lambda[0], okOne), twoVar.reduce(r0)));

  for (int u = 0; u <= M; ++u) {
    const Element& lam = lambda[static_cast<std::size_t>(u)];
    const unsigned long pu1 = ipow(p, u + 1);
    const Element dpow = okOne.pow(d, pu1);
    // Right-hand side of g_u^p; all of its monomials are already admissible.
    Element S = okOne.mul(lam, dpow);
    okOne.set_coefficient(S, 0, ring.sub(okOne.coefficient(S, 0), ring.prime()));
    Element gnext = twoVar.zero();
    {
      const long idx = twoVar.index_of(generator_monomial(slots, u + 1));
      if (idx >= 0) gnext = twoVar.basis(static_cast<std::size_t>(idx));
    }
    const Element rhs =
        twoVar.add(twoVar.mul(twoVar.from_series(S, okOne), gnext), twoVar.mul(twoVar.from_series(dpow, okOne), rprime));
    std::vector<RawTerm> terms;
    for (std::size_t i = 0; i < twoVar.size(); ++i) {
      WittScalar c = twoVar.coefficient(rhs, i);
      if (ring.is_zero(c)) continue;
      terms.push_back(RawTerm{std::move(c), twoVar.monomial(i)});
    }
    twoVar.set_relation(u, std::move(terms));

    const Element lam_g = twoVar.mul(twoVar.from_series(lam, okOne), gnext);
    Element divided = twoVar.add(lam_g, rprime);
    Element full = twoVar.mul(twoVar.from_series(okOne.pow(phi_d, ipow(p, u)), okOne), divided);
    tables.rprime.push_back(rprime);
    tables.phiDivided.push_back(divided);
    tables.phiFull.push_back(full);
    twoVar.set_generator_image(u, std::move(full));

    if (u < M) {
      PrecisionLedger step = work;
      const Element A = twoVar.delta(rprime, step);
      const Element Bw = w1(twoVar, lam_g, rprime);
      PrecisionLedger step2 = work;
      const Element t = okOne.delta(okOne.mul(dpow, lam), step2);
      const Element inv = okOne.series_inverse(okOne.sub(okOne.constant(ring.one()), t));
      rprime = twoVar.mul(twoVar.add(A, Bw), twoVar.from_series(inv, okOne));
      work.valid = std::min(step.valid, step2.valid);
    }
  }
  twoVar.set_generator_image(M + 1, twoVar.zero());
  tables.ledger.valid = std::min(tables.ledger.valid, work.valid);
  return tables;
}

LambdaData make_lambda_data(const EnvelopeSpec& base, int U_max) {
  EnvelopeSpec s = base;
  s.kind = EnvelopeKind::OKOneVar;
  LambdaData out;
  out.okOne = std::make_shared<Envelope>(s);
  out.ledger.valid = s.ring->W();
  out.lambda = build_lambda(*out.okOne, U_max, out.ledger);
  return out;
}

std::vector<BasisLabel> enumerate_basis(const Envelope& env, BasisKind kind, int level, int a, int b) {
  if (b < a) raise(ErrorCode::EmptyRange, "empty weight range");
  if (a < 0 || b > env.B()) raise(ErrorCode::InvalidArgument, "weight range outside the truncation");
  if (kind == BasisKind::Nygaard && env.kind() == EnvelopeKind::OKTwoVar)
    raise(ErrorCode::InvalidArgument, "Nygaard bases are enumerated for one-variable envelopes");
  const unsigned p = env.ring().p();
  std::vector<BasisLabel> out;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const int w = env.weight(i);
    if (w < a || w > b) continue;
    BasisLabel label;
    label.mono = env.monomial(i);
    label.weight = w;
    if (kind == BasisKind::Nygaard) {
      long m = 0, pu = 1;
      for (int e : label.mono.exps) {
        m += pu * e;
        pu *= p;
      }
      label.dtilde = m >= level ? 0 : static_cast<int>(level - m);
    }
    out.push_back(std::move(label));
  }
  return out;
}

}  // namespace kchain
