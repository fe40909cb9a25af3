// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "kchain/padic.hpp"

namespace kchain {

enum class EnvelopeKind {
  QuotientOneVar,  // O_K/pi^n over W[[z0]], generators f_u
  OKOneVar,        // O_K over W[[z0]], no generators
  OKTwoVar,        // O_K over W[[z0, z1]] with z1 = z0 + g0, generators g_u
};

// Eisenstein data plus truncation bound for one envelope.
struct EnvelopeSpec {
  WittRingPtr ring;
  int n = 1;  // quotient exponent; ignored for the O_K kinds
  int e = 1;
  std::vector<WittScalar> E;  // low-to-high, E[0] = p, size e+1
  int B = 0;                  // F-weight truncation bound
  EnvelopeKind kind = EnvelopeKind::OKOneVar;
};

// Builds the Eisenstein polynomial p + c_1 z + ... + c_e z^e and validates it.
std::vector<WittScalar> make_eisenstein(const WittRing& ring, const std::vector<mpz_class>& nonconstant);
void validate_eisenstein(const WittRing& ring, const std::vector<WittScalar>& E);

// z0^k times a product of generator powers. Admissible when every exponent is
// below p (and k < n for the quotient).
struct Monomial {
  int k = 0;
  std::vector<int> exps;

  bool operator==(const Monomial& other) const;
};

// Dense element: coordinates for every admissible monomial, f residues each.
using Element = std::vector<mpz_class>;

// Sparse normal form of a raw monomial.
struct SparseElement {
  std::vector<std::uint32_t> idx;
  std::vector<mpz_class> coef;  // f values per index
};

// One summand coef * z0^k * prod gen^exps of a pth-power relation.
struct RawTerm {
  WittScalar coef;
  Monomial mono;
};

class Envelope {
 public:
  explicit Envelope(EnvelopeSpec spec);

  const EnvelopeSpec& spec() const { return spec_; }
  const WittRing& ring() const { return *spec_.ring; }
  EnvelopeKind kind() const { return spec_.kind; }
  int B() const { return spec_.B; }
  unsigned f() const { return f_; }
  // Largest generator index that can occur with weight <= B.
  int max_generator() const { return M_; }
  int generator_slots() const { return G_; }
  std::size_t size() const { return monos_.size(); }

  const Monomial& monomial(std::size_t idx) const { return monos_[idx]; }
  int weight(std::size_t idx) const { return weights_[idx]; }
  int weight(const Monomial& m) const;
  bool admissible(const Monomial& m) const;
  // Index of an admissible monomial of weight <= B, or -1.
  long index_of(const Monomial& m) const;

  Element zero() const { return Element(size() * f_, 0); }
  Element basis(std::size_t idx) const;
  Element constant(const WittScalar& c) const;
  bool is_zero(const Element& a) const;
  WittScalar coefficient(const Element& a, std::size_t idx) const;
  void set_coefficient(Element& a, std::size_t idx, const WittScalar& c) const;

  Element add(const Element& a, const Element& b) const;
  Element sub(const Element& a, const Element& b) const;
  Element neg(const Element& a) const;
  Element scale(const Element& a, const WittScalar& c) const;
  Element mul(const Element& a, const Element& b) const;
  Element pow(const Element& a, unsigned long e) const;

  // Normal form of c * raw monomial.
  Element reduce(const Monomial& raw, const WittScalar& c) const;
  Element reduce(const std::vector<RawTerm>& raw) const;
  const SparseElement& normal_form(const Monomial& raw) const;

  // z0^k in normal form.
  Element z_power(int k) const;
  // Element of this envelope given by a z0-series (from an OKOneVar envelope).
  Element from_series(const Element& series, const Envelope& series_env) const;
  // z0-coefficients of an OKOneVar element or of the generator-free part.
  Element to_series(const Element& a) const;

  // Inverse of a z0-series with unit constant term (OKOneVar only).
  Element series_inverse(const Element& a) const;

  // Frobenius-type substitution: sigma on coefficients, z0 -> z0^p, and
  // generator u -> generator_image(u). With the Frobenius images of the g_u
  // this is phi; with the divided images of the f_u it realizes the divided
  // Frobenius on the generator part of Nygaard basis elements.
  Element phi(const Element& a) const;
  // (phi(a) - a^p) / p; the ledger loses one digit.
  Element delta(const Element& a, PrecisionLedger& ledger) const;

  // Table installation (done once by the table builders).
  void set_relation(int u, std::vector<RawTerm> terms);
  bool has_relation(int u) const;
  // Right-hand side of gen_u^p as raw terms.
  const std::vector<RawTerm>& relation(int u) const;
  void set_generator_image(int u, Element image);

 private:
  struct Key {
    std::uint64_t lo = 0, hi = 0;
    bool operator==(const Key& o) const { return lo == o.lo && hi == o.hi; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  Key pack(const Monomial& m) const;
  SparseElement compute_normal_form(const Monomial& raw) const;
  void accumulate(mpz_class* dst, const mpz_class* scalar, const SparseElement& nf) const;
  void normalize(Element& a) const;
  const SparseElement& pair_product(std::size_t i, std::size_t j) const;
  const Element& phi_monomial(std::size_t idx) const;

  EnvelopeSpec spec_;
  unsigned f_;
  int genw_;  // weight of generator 0: n for the quotient, 1 for g
  int M_;
  int G_;
  std::vector<Monomial> monos_;
  std::vector<int> weights_;
  std::vector<int> weight_start_;  // first index of each weight

  std::vector<std::vector<RawTerm>> relations_;
  std::vector<bool> has_relation_;
  std::vector<Element> gen_images_;
  std::vector<bool> has_image_;

  mutable std::shared_mutex memo_mutex_;
  mutable std::unordered_map<Key, SparseElement, KeyHash> memo_;
  mutable std::vector<const SparseElement*> pair_cache_;
  mutable std::unordered_map<std::size_t, Element> phi_cache_;
};

using EnvelopePtr = std::shared_ptr<Envelope>;

// w1(x, y) = (x^p + y^p - (x + y)^p) / p, computed with integral binomials.
Element w1(const Envelope& env, const Element& x, const Element& y);

// Relation tables for one generator family.
struct RelationTables {
  int M = 0;                       // largest generator index with a relation
  std::vector<Element> lambda;     // lambda_u as z0-series (OKOneVar envelope)
  std::vector<Element> rprime;     // R'_u in the owning envelope
  std::vector<Element> phiDivided; // phi_{p^u}(gen_u) = lambda_u gen_{u+1} + R'_u
  std::vector<Element> phiFull;    // phi(gen_u) = phi(d)^{p^u} phi_{p^u}(gen_u)
  PrecisionLedger ledger;
};

// lambda_0 = -1/delta(d), lambda_{u+1} = lambda_u^p / (1 - delta(d^{p^{u+1}} lambda_u)).
// ledger.valid on return is the precision of lambda_{U_max}.
std::vector<Element> build_lambda(const Envelope& okOne, int U_max, PrecisionLedger& ledger);

RelationTables build_f_tables(Envelope& quotient, const Envelope& okOne, const std::vector<Element>& lambda,
                              const PrecisionLedger& lambda_ledger);
RelationTables build_g_tables(Envelope& twoVar, const Envelope& okOne, const std::vector<Element>& lambda,
                              const PrecisionLedger& lambda_ledger);

// Bundles an OKOneVar envelope with lambda tables for a given spec.
struct LambdaData {
  std::shared_ptr<Envelope> okOne;
  std::vector<Element> lambda;
  PrecisionLedger ledger;
};
LambdaData make_lambda_data(const EnvelopeSpec& base, int U_max);

// Basis labels for the plain envelope or its Nygaard filtration N^{>=level}.
struct BasisLabel {
  int dtilde = 0;  // exponent of the Nygaard generator d~ (0 for plain)
  Monomial mono;
  int weight = 0;
};
enum class BasisKind { Plain, Nygaard };
std::vector<BasisLabel> enumerate_basis(const Envelope& env, BasisKind kind, int level, int a, int b);

// Smallest integer M with p^(M+1) * genw > B, at least 0.
int generator_bound(unsigned p, int genw, int B);

struct NilpotenceVerdict {
  bool vanishes = false;
  bool sharp = false;
  long exponent = 0;
  int B = 0;
};

enum class NilpotenceMode { Plain, Nygaard };

// Plain mode: z^K with K = p[j]_p e - p^j (je - n) vanishes mod p and z^(K-1)
// does not. Nygaard mode: with v = z^e d~^(p-1), v^[j]_p vanishes mod p in
// N^{>=(p-1)[j]_p} and v^([j]_p - 1) does not. Here j = ceil(n/e).
// B <= 0 selects the default bound p[j]_p e + n + e p^(j+1).
NilpotenceVerdict nilpotence_witness(unsigned p, unsigned f, int n, int e, const std::vector<mpz_class>& eisenstein,
                                     NilpotenceMode mode, int B = 0);

// Whether z^a d^N is nonzero mod p in F^{[0,B]} N^{>=N} of the quotient envelope.
bool nygaard_nonzero_mod_p(unsigned p, unsigned f, int n, int e, const std::vector<mpz_class>& eisenstein, long a,
                           int N, int B);

}  // namespace kchain
