// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "kchain_oracles/oracles.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "kchain/linalg.hpp"

namespace kchain::oracle {

namespace {

using Key = std::pair<int, std::vector<int>>;

long generator_weight(const Envelope& env, int u) {
  long w = env.spec().n;
  for (int t = 0; t < u; ++t) w *= env.ring().p();
  return w;
}

long weight_of(const Envelope& env, const Key& key) {
  long w = key.first;
  for (std::size_t u = 0; u < key.second.size(); ++u) w += key.second[u] * generator_weight(env, static_cast<int>(u));
  return w;
}

void add_term(const Envelope& env, std::map<Key, WittScalar>& pool, Key key, const WittScalar& c) {
  if (weight_of(env, key) > env.B()) return;
  const WittRing& ring = env.ring();
  auto it = pool.find(key);
  if (it == pool.end()) {
    if (!ring.is_zero(c)) pool.emplace(std::move(key), c);
    return;
  }
  it->second = ring.add(it->second, c);
  if (ring.is_zero(it->second)) pool.erase(it);
}

Key key_of(const Envelope& env, const Monomial& m) {
  Key key{m.k, m.exps};
  const std::size_t slots = static_cast<std::size_t>(env.generator_slots());
  if (key.second.size() < slots) key.second.resize(slots, 0);
  return key;
}

mpz_class bareiss_det(std::vector<std::vector<mpz_class>> a) {
  const std::size_t n = a.size();
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t s = start; s < n; ++s) {
    cur.push_back(s);
    subsets(n, k, s + 1, cur, out);
    cur.pop_back();
  }
}

unsigned valuation(mpz_class v, unsigned p) {
  unsigned k = 0;
  while (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
    mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), p);
    ++k;
  }
  return k;
}

}  // namespace

Element randomized_rewrite(const Envelope& env, const std::vector<RawTerm>& input, std::mt19937_64& rng) {
  const int p = static_cast<int>(env.ring().p());
  const int n = env.spec().n;
  std::map<Key, WittScalar> pool;
  for (const RawTerm& t : input) add_term(env, pool, key_of(env, t.mono), t.coef);

  for (;;) {
    std::vector<Key> reducible;
    for (const auto& [key, c] : pool) {
      bool red = key.first >= n;
      for (int e : key.second) red = red || e >= p;
      if (red) reducible.push_back(key);
    }
    if (reducible.empty()) break;
    const Key key = reducible[std::uniform_int_distribution<std::size_t>(0, reducible.size() - 1)(rng)];
    std::vector<int> rules;  // -1 is z0^n -> f_0, u >= 0 is the relation of f_u
    if (key.first >= n) rules.push_back(-1);
    for (std::size_t u = 0; u < key.second.size(); ++u)
      if (key.second[u] >= p) rules.push_back(static_cast<int>(u));
    const int rule = rules[std::uniform_int_distribution<std::size_t>(0, rules.size() - 1)(rng)];
    const WittScalar c = pool.at(key);
    pool.erase(key);
    if (rule < 0) {
      Key next = key;
      next.first -= n;
      next.second[0] += 1;
      add_term(env, pool, next, c);
      continue;
    }
    Key base = key;
    base.second[static_cast<std::size_t>(rule)] -= p;
    for (const RawTerm& t : env.relation(rule)) {
      Key next = base;
      next.first += t.mono.k;
      for (std::size_t u = 0; u < t.mono.exps.size(); ++u) next.second[u] += t.mono.exps[u];
      add_term(env, pool, next, env.ring().mul(c, t.coef));
    }
  }

  Element out = env.zero();
  for (const auto& [key, c] : pool) {
    const long idx = env.index_of(Monomial{key.first, key.second});
    if (idx < 0) raise(ErrorCode::InvalidArgument, "rewriter produced a monomial without basis index");
    env.set_coefficient(out, static_cast<std::size_t>(idx), c);
  }
  return out;
}

std::vector<RawTerm> random_raw_input(const Envelope& env, std::mt19937_64& rng) {
  const WittRing& ring = env.ring();
  const int p = static_cast<int>(ring.p());
  const int slots = env.generator_slots();
  std::uniform_int_distribution<int> nterms(1, 3);
  std::uniform_int_distribution<int> kdist(0, env.B() + 2);
  std::uniform_int_distribution<long> cdist(-1000, 1000);
  std::vector<RawTerm> out;
  const int count = nterms(rng);
  for (int t = 0; t < count; ++t) {
    RawTerm term;
    term.mono.k = kdist(rng);
    term.mono.exps.assign(static_cast<std::size_t>(slots), 0);
    for (int u = 0; u < slots; ++u) {
      const long room = std::max<long>(0, (env.B() + 2 - term.mono.k) / generator_weight(env, u));
      term.mono.exps[static_cast<std::size_t>(u)] =
          std::uniform_int_distribution<int>(0, static_cast<int>(std::min<long>(room, 2L * p)))(rng);
    }
    std::vector<mpz_class> coef(ring.f());
    for (auto& v : coef) v = cdist(rng);
    WittScalar c = ring.zero();
    for (unsigned d = 0; d < ring.f(); ++d)
      c = ring.add(c, ring.mul(ring.from_int(coef[d]), ring.x_power(d)));
    term.coef = c;
    out.push_back(std::move(term));
  }
  return out;
}

bool agree_mod(const Envelope& env, const Element& a, const Element& b, unsigned digits) {
  const mpz_class m = env.ring().p_power(digits);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const mpz_class d = a[k] - b[k];
    if (!mpz_divisible_p(d.get_mpz_t(), m.get_mpz_t())) return false;
  }
  return true;
}

std::vector<unsigned> determinantal_divisor_valuations(const std::vector<std::vector<mpz_class>>& a, unsigned p) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  std::vector<unsigned> D{0};  // valuation of D_0 = 1
  for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
    std::vector<std::vector<std::size_t>> rsets, csets;
    std::vector<std::size_t> cur;
    subsets(rows, k, 0, cur, rsets);
    subsets(cols, k, 0, cur, csets);
    unsigned best = std::numeric_limits<unsigned>::max();
    for (const auto& rs : rsets) {
      for (const auto& cs : csets) {
        std::vector<std::vector<mpz_class>> sub(k, std::vector<mpz_class>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub[i][j] = a[rs[i]][cs[j]];
        const mpz_class det = bareiss_det(std::move(sub));
        if (det != 0) best = std::min(best, valuation(det, p));
      }
    }
    if (best == std::numeric_limits<unsigned>::max()) break;
    D.push_back(best);
  }
  std::vector<unsigned> out;
  for (std::size_t k = 1; k < D.size(); ++k) out.push_back(D[k] - D[k - 1]);
  return out;
}

LibrarySnf library_snf(const std::vector<std::vector<mpz_class>>& a, unsigned p, unsigned W) {
  PadicMatrix m(p, W, a.size(), a.empty() ? 0 : a[0].size());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m.at(r, c) = a[r][c];
  m.normalize();
  const SNFResult s = smith(m, false);
  return LibrarySnf{s.divisors, s.indistinct};
}

std::vector<unsigned> unit_group_p_part(unsigned p, unsigned n) {
  unsigned long mod = 1;
  for (unsigned k = 0; k < n; ++k) mod *= p;
  // N[k] = number of units x with x^(p^k) = 1.
  std::vector<unsigned long> N;
  for (unsigned k = 0;; ++k) {
    unsigned long count = 0;
    for (unsigned long x = 1; x < mod; ++x) {
      if (x % p == 0) continue;
      unsigned long y = x;
      for (unsigned t = 0; t < k; ++t) {
        unsigned long z = 1;
        for (unsigned s = 0; s < p; ++s) z = z * y % mod;
        y = z;
      }
      if (y == 1) ++count;
    }
    N.push_back(count);
    if (k > 0 && N[k] == N[k - 1]) break;
  }
  // Factors with exponent >= k number log_p(N[k] / N[k-1]).
  std::vector<unsigned> ge;
  for (std::size_t k = 1; k < N.size(); ++k) {
    unsigned long ratio = N[k] / N[k - 1];
    unsigned c = 0;
    while (ratio > 1) {
      ratio /= p;
      ++c;
    }
    ge.push_back(c);
  }
  std::vector<unsigned> out;
  for (std::size_t k = 0; k < ge.size(); ++k) {
    const unsigned next = k + 1 < ge.size() ? ge[k + 1] : 0;
    for (unsigned t = 0; t < ge[k] - next; ++t) out.push_back(static_cast<unsigned>(k + 1));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kchain::oracle
