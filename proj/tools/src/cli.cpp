// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "kchain/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

namespace kchain::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> coefficient_strings(const std::vector<mpz_class>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& c : v) out.push_back(c.get_str());
  return out;
}

ordered_json coefficients_to_json(const std::vector<mpz_class>& v) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : v) {
    if (c.fits_slong_p())
      arr.push_back(c.get_si());
    else
      arr.push_back(c.get_str());
  }
  return arr;
}

std::vector<mpz_class> coefficients_from_json(const json& arr) {
  std::vector<mpz_class> out;
  for (const auto& v : arr) {
    if (v.is_string())
      out.emplace_back(v.get<std::string>());
    else
      out.emplace_back(static_cast<long>(v.get<std::int64_t>()));
  }
  return out;
}

std::string join(const std::vector<unsigned>& v, const char* sep) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += sep;
    s += std::to_string(v[k]);
  }
  return s;
}

std::optional<ErrorCode> error_from_string(const std::string& s) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::InvalidArgument); ++c)
    if (to_string(static_cast<ErrorCode>(c)) == s) return static_cast<ErrorCode>(c);
  return std::nullopt;
}

bool is_usage_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPrimeP:
    case ErrorCode::ReducibleMinimalPolynomial:
    case ErrorCode::NonSeparable:
    case ErrorCode::NotEisenstein:
    case ErrorCode::NotDistinguished:
    case ErrorCode::InvalidArgument:
    case ErrorCode::EmptyRange:
      return true;
    default:
      return false;
  }
}

int eisenstein_degree(const std::vector<mpz_class>& e) { return e.empty() ? 1 : static_cast<int>(e.size()); }

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(ErrorCode::InvalidArgument, "cannot open output file " + path);
  f << text;
}

// Runs jobs on a small pool; results keep job order.
std::vector<JobOutcome> run_jobs(const std::vector<JobKey>& keys, const KGroupOptions& base, unsigned threads) {
  std::vector<JobOutcome> outcomes(keys.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= keys.size()) return;
      const JobKey& key = keys[k];
      JobOutcome& o = outcomes[k];
      o.key = key;
      KGroupOptions opt = base;
      opt.precision = key.W;
      try {
        o.result = kgroups(key.p, key.f, key.n, key.i, opt);
      } catch (const Error& e) {
        o.error = e.code();
        o.message = e.what();
      }
    }
  };
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(keys.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return outcomes;
}

}  // namespace

// ---------------------------------------------------------------------------

std::uint64_t JobKey::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  mix(std::to_string(p));
  mix(std::to_string(f));
  mix(std::to_string(n));
  mix(std::to_string(i));
  for (const auto& c : eisenstein) mix(c.get_str());
  mix(std::to_string(W));
  return h;
}

bool JobKey::operator==(const JobKey& o) const {
  return p == o.p && f == o.f && n == o.n && i == o.i && eisenstein == o.eisenstein && W == o.W;
}

bool JobKey::operator<(const JobKey& o) const {
  return std::tie(p, f, n, i, W) < std::tie(o.p, o.f, o.n, o.i, o.W) ||
         (std::tie(p, f, n, i, W) == std::tie(o.p, o.f, o.n, o.i, o.W) &&
          coefficient_strings(eisenstein) < coefficient_strings(o.eisenstein));
}

ordered_json to_json(const KGroupResult& r) {
  ordered_json j;
  j["p"] = r.p;
  j["f"] = r.f;
  j["n"] = r.n;
  j["i"] = r.i;
  j["eisenstein"] = coefficients_to_json(r.eisenstein);
  j["h1"] = r.h1;
  j["h2"] = r.h2;
  j["precision"] = ordered_json{{"target", r.precision.target}, {"working", r.precision.working}, {"valid", r.precision.valid}};
  j["millis"] = r.millis;
  return j;
}

KGroupResult result_from_json(const json& j) {
  KGroupResult r;
  r.p = j.at("p").get<unsigned>();
  r.f = j.at("f").get<unsigned>();
  r.n = j.at("n").get<int>();
  r.i = j.at("i").get<int>();
  r.eisenstein = coefficients_from_json(j.at("eisenstein"));
  r.h1 = j.at("h1").get<std::vector<unsigned>>();
  r.h2 = j.at("h2").get<std::vector<unsigned>>();
  const json& pr = j.at("precision");
  r.precision.target = pr.at("target").get<unsigned>();
  r.precision.working = pr.at("working").get<unsigned>();
  r.precision.valid = pr.at("valid").get<unsigned>();
  r.millis = j.at("millis").get<double>();
  return r;
}

ordered_json to_json(const JobOutcome& o) {
  if (o.result) return to_json(*o.result);
  ordered_json j;
  j["p"] = o.key.p;
  j["f"] = o.key.f;
  j["n"] = o.key.n;
  j["i"] = o.key.i;
  j["eisenstein"] = coefficients_to_json(o.key.eisenstein.empty() ? std::vector<mpz_class>{1} : o.key.eisenstein);
  j["error"] = std::string(to_string(o.error.value_or(ErrorCode::CheckFailed)));
  if (!o.message.empty()) j["message"] = o.message;
  return j;
}

JobOutcome outcome_from_json(const json& j) {
  JobOutcome o;
  o.key.p = j.at("p").get<unsigned>();
  o.key.f = j.at("f").get<unsigned>();
  o.key.n = j.at("n").get<int>();
  o.key.i = j.at("i").get<int>();
  o.key.eisenstein = coefficients_from_json(j.at("eisenstein"));
  if (j.contains("error")) {
    o.error = error_from_string(j.at("error").get<std::string>()).value_or(ErrorCode::CheckFailed);
    if (j.contains("message")) o.message = j.at("message").get<std::string>();
    return o;
  }
  o.result = result_from_json(j);
  o.key.W = o.result->precision.working;
  return o;
}

std::string emit_json(const std::vector<JobOutcome>& outcomes) {
  std::string s;
  for (const auto& o : outcomes) s += to_json(o).dump() + "\n";
  return s;
}

std::string emit_csv(const std::vector<JobOutcome>& outcomes) {
  std::string s = "p,f,n,i,eisenstein,h1,h2,target,working,valid,millis,error\n";
  for (const auto& o : outcomes) {
    const std::vector<mpz_class> e = o.key.eisenstein.empty() ? std::vector<mpz_class>{1} : o.key.eisenstein;
    std::string es;
    for (std::size_t k = 0; k < e.size(); ++k) es += (k ? "," : "") + e[k].get_str();
    s += fmt::format("{},{},{},{},\"{}\",", o.key.p, o.key.f, o.key.n, o.key.i, es);
    if (o.result) {
      const auto& r = *o.result;
      s += fmt::format("\"{}\",\"{}\",{},{},{},{:.3f},\n", join(r.h1, ","), join(r.h2, ","), r.precision.target,
                       r.precision.working, r.precision.valid, r.millis);
    } else {
      s += fmt::format("x,x,,,,,{}\n", to_string(o.error.value_or(ErrorCode::CheckFailed)));
    }
  }
  return s;
}

std::string ring_label(unsigned p, unsigned f, int n, const std::vector<mpz_class>& eisenstein) {
  const bool unramified = eisenstein.empty() || (eisenstein.size() == 1 && eisenstein[0] == 1);
  if (unramified && f == 1) return fmt::format("Z/{}^{}", p, n);
  std::string q = f == 1 ? std::to_string(p) : fmt::format("{}^{}", p, f);
  if (unramified) return fmt::format("W(F_{})/{}^{}", q, p, n);
  std::string poly = std::to_string(p);
  for (std::size_t k = 0; k < eisenstein.size(); ++k) {
    if (eisenstein[k] == 0) continue;
    const std::string c = eisenstein[k] == 1 ? "" : eisenstein[k].get_str() + "*";
    poly += fmt::format("+{}z{}", c, k == 0 ? "" : "^" + std::to_string(k + 1));
  }
  return fmt::format("O_K/pi^{}[q={},E={}]", n, q, poly);
}

std::string emit_table(const std::vector<JobOutcome>& outcomes) {
  struct Column {
    std::tuple<unsigned, unsigned, int, std::vector<std::string>> id;
    std::string label;
    std::map<int, std::string> cells;
  };
  std::vector<Column> columns;
  std::vector<int> rows;
  for (const auto& o : outcomes) {
    auto id = std::make_tuple(o.key.p, o.key.f, o.key.n, coefficient_strings(o.key.eisenstein.empty() ? std::vector<mpz_class>{1} : o.key.eisenstein));
    auto it = std::find_if(columns.begin(), columns.end(), [&](const Column& c) { return c.id == id; });
    if (it == columns.end()) {
      columns.push_back(Column{id, ring_label(o.key.p, o.key.f, o.key.n, o.key.eisenstein), {}});
      it = columns.end() - 1;
    }
    const int odd = 2 * o.key.i - 1;
    const int even = 2 * o.key.i - 2;
    it->cells[odd] = o.result ? join(o.result->h1, ",") : "x";
    rows.push_back(odd);
    if (o.key.i >= 2) {
      it->cells[even] = o.result ? join(o.result->h2, ",") : "x";
      rows.push_back(even);
    }
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::string s = "K_r";
  for (const auto& c : columns) s += "\t" + c.label;
  s += "\n";
  for (int r : rows) {
    s += "K_" + std::to_string(r);
    for (const auto& c : columns) {
      auto it = c.cells.find(r);
      s += "\t" + (it == c.cells.end() ? std::string() : it->second);
    }
    s += "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------

ResultCache::ResultCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const JobOutcome o = outcome_from_json(json::parse(line));
      if (o.result) lines_[o.key] = line;
    } catch (const std::exception&) {
      // A torn trailing line from an interrupted run is skipped.
    }
  }
}

const std::string* ResultCache::find(const JobKey& key) const {
  auto it = lines_.find(key);
  return it == lines_.end() ? nullptr : &it->second;
}

void ResultCache::append(const JobKey& key, const std::string& line) {
  if (lines_.count(key)) return;
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) raise(ErrorCode::InvalidArgument, "cannot open cache file " + path_);
  out << line << "\n";
  lines_[key] = line;
}

std::vector<JobOutcome> read_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::InvalidArgument, "cannot open fixture " + path);
  std::vector<JobOutcome> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(outcome_from_json(json::parse(line)));
  }
  return out;
}

std::optional<CheckFailure> check_outcomes(const std::vector<JobOutcome>& outcomes) {
  for (const auto& o : outcomes) {
    if (!o.result) continue;
    const KGroupResult& r = *o.result;
    const std::string where = fmt::format("p={} f={} n={} i={}", r.p, r.f, r.n, r.i);
    if (!angeltveit_check(r)) {
      const long s1 = std::accumulate(r.h1.begin(), r.h1.end(), 0L);
      const long s2 = std::accumulate(r.h2.begin(), r.h2.end(), 0L);
      return CheckFailure{"angeltveit", fmt::format("{}: sum(h1) - sum(h2) = {} but f*i*(n-1) = {}", where, s1 - s2,
                                                    static_cast<long>(r.f) * r.i * (r.n - 1))};
    }
    if (r.i == 1 && !r.h2.empty()) return CheckFailure{"k0-torsion-free", where + ": h2 must be empty for i = 1"};
    const long threshold = even_vanishing_threshold(r.p, eisenstein_degree(r.eisenstein), r.n);
    if (r.i >= threshold && !r.h2.empty())
      return CheckFailure{"even-vanishing", fmt::format("{}: h2 = [{}] but i >= {}", where, join(r.h2, ","), threshold)};
    if (r.precision.working > 0) {
      if (r.precision.valid < r.precision.target)
        return CheckFailure{"precision", fmt::format("{}: valid {} below target {}", where, r.precision.valid, r.precision.target)};
      for (unsigned v : r.h1)
        if (v >= r.precision.valid) return CheckFailure{"precision", where + ": exponent not below the trusted digits"};
      for (unsigned v : r.h2)
        if (v >= r.precision.valid) return CheckFailure{"precision", where + ": exponent not below the trusted digits"};
    }
  }
  return std::nullopt;
}

std::vector<mpz_class> parse_coefficients(const std::string& text) {
  std::vector<mpz_class> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) raise(ErrorCode::InvalidArgument, "empty coefficient in list");
    mpz_class v;
    if (v.set_str(item, 10) != 0) raise(ErrorCode::InvalidArgument, "not an integer: " + item);
    out.push_back(v);
  }
  if (out.empty()) raise(ErrorCode::InvalidArgument, "empty coefficient list");
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct RangeFlags {
  unsigned p = 0;
  unsigned f = 1;
  int n = 0;
  int i = 0;
  int i_min = 0;
  int i_max = 0;
  std::string eisenstein;
  unsigned precision = 0;
  bool adaptive = false;
  unsigned jobs = 0;
};

void add_range_flags(CLI::App* app, RangeFlags& r) {
  app->add_option("--p", r.p, "prime p")->check(CLI::PositiveNumber);
  app->add_option("--f", r.f, "residue degree f")->check(CLI::PositiveNumber);
  app->add_option("--n", r.n, "quotient exponent n")->check(CLI::PositiveNumber);
  app->add_option("--i", r.i, "single weight i")->check(CLI::PositiveNumber);
  app->add_option("--i-min", r.i_min, "first weight of a range")->check(CLI::PositiveNumber);
  app->add_option("--i-max", r.i_max, "last weight of a range")->check(CLI::PositiveNumber);
  app->add_option("--eisenstein", r.eisenstein,
                  "non-constant Eisenstein coefficients c_1,...,c_e low-to-high; the constant term is p (default: 1)");
  app->add_option("--precision", r.precision, "working precision W in p-adic digits (default: planned)");
  app->add_flag("--adaptive", r.adaptive, "double W and restart when precision runs out");
  app->add_option("--jobs", r.jobs, "worker threads (default: hardware concurrency)");
}

// Validates ring data and builds the job list.
std::vector<JobKey> make_jobs(const RangeFlags& r, std::vector<mpz_class>& eisenstein) {
  if (r.p == 0 || r.n == 0) raise(ErrorCode::InvalidArgument, "--p and --n are required");
  if (!is_prime(r.p)) raise(ErrorCode::NonPrimeP, fmt::format("{} is not prime", r.p));
  int lo = r.i, hi = r.i;
  if (r.i == 0) {
    if (r.i_min == 0 || r.i_max == 0) raise(ErrorCode::InvalidArgument, "give --i or both --i-min and --i-max");
    lo = r.i_min;
    hi = r.i_max;
  } else if (r.i_min != 0 || r.i_max != 0) {
    raise(ErrorCode::InvalidArgument, "--i cannot be combined with --i-min/--i-max");
  }
  if (hi < lo) raise(ErrorCode::EmptyRange, "--i-max is below --i-min");
  eisenstein = r.eisenstein.empty() ? std::vector<mpz_class>{1} : parse_coefficients(r.eisenstein);
  const WittRingPtr probe = make_ring(r.p, r.f, 4, {});
  (void)eisenstein_for(*probe, eisenstein);
  std::vector<JobKey> keys;
  for (int i = lo; i <= hi; ++i) {
    JobKey k{r.p, r.f, r.n, i, eisenstein, r.precision};
    if (k.W == 0) k.W = precision_plan(r.p, r.f, r.n, i).effective();
    keys.push_back(std::move(k));
  }
  return keys;
}

KGroupOptions options_for(const RangeFlags& r, const std::vector<mpz_class>& eisenstein) {
  KGroupOptions opt;
  opt.eisenstein = eisenstein;
  opt.adaptive = r.adaptive;
  return opt;
}

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

int report_usage_or_failure(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  return is_usage_error(e.code()) ? kUsage : kCheckFailure;
}

int cmd_compute(const RangeFlags& flags, const std::string& format, const std::string& out_path,
                const std::string& cache_path, std::ostream& out, std::ostream& err) {
  std::vector<mpz_class> eisenstein;
  std::vector<JobKey> keys;
  try {
    keys = make_jobs(flags, eisenstein);
  } catch (const Error& e) {
    return report_usage_or_failure(e, err);
  }
  std::optional<ResultCache> cache;
  if (!cache_path.empty()) cache.emplace(cache_path);

  std::vector<JobOutcome> outcomes(keys.size());
  std::vector<std::string> lines(keys.size());
  std::vector<JobKey> pending;
  std::vector<std::size_t> pending_slot;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const std::string* hit = cache ? cache->find(keys[k]) : nullptr;
    if (hit) {
      outcomes[k] = outcome_from_json(json::parse(*hit));
      outcomes[k].key = keys[k];
      lines[k] = *hit;
    } else {
      pending.push_back(keys[k]);
      pending_slot.push_back(k);
    }
  }
  const std::vector<JobOutcome> fresh = run_jobs(pending, options_for(flags, eisenstein), thread_count(flags.jobs));
  for (std::size_t k = 0; k < fresh.size(); ++k) {
    const std::size_t slot = pending_slot[k];
    outcomes[slot] = fresh[k];
    lines[slot] = to_json(fresh[k]).dump();
  }
  for (const auto& o : outcomes) {
    if (o.error && is_usage_error(*o.error)) {
      err << "error: " << o.message << "\n";
      return kUsage;
    }
  }

  std::string text;
  if (format == "json") {
    for (const auto& l : lines) text += l + "\n";
  } else if (format == "csv") {
    text = emit_csv(outcomes);
  } else {
    text = emit_table(outcomes);
  }
  try {
    write_output(text, out_path, out);
    if (cache)
      for (std::size_t k = 0; k < fresh.size(); ++k)
        if (fresh[k].result) cache->append(keys[pending_slot[k]], lines[pending_slot[k]]);
  } catch (const Error& e) {
    return report_usage_or_failure(e, err);
  }

  int code = kOk;
  for (const auto& o : outcomes) {
    if (o.error && *o.error != ErrorCode::PrecisionExhausted) {
      err << "error: i=" << o.key.i << ": " << o.message << "\n";
      code = kCheckFailure;
    } else if (o.error) {
      err << "warning: i=" << o.key.i << ": precision exhausted at W=" << o.key.W << "\n";
    }
  }
  if (auto failure = check_outcomes(outcomes)) {
    err << "check failed: " << failure->identity << ": " << failure->detail << "\n";
    code = kCheckFailure;
  }
  return code;
}

struct VerifyFlags {
  RangeFlags range;
  std::vector<std::string> fixtures;
  bool nilpotence = false;
  bool isogeny = false;
  bool compare = false;
  int max_rank = 30;
};

int cmd_verify(const VerifyFlags& v, std::ostream& out, std::ostream& err) {
  int failures = 0;
  auto pass = [&out](const std::string& what) { out << "PASS " << what << "\n"; };
  auto fail = [&out, &failures](const std::string& what) {
    out << "FAIL " << what << "\n";
    ++failures;
  };
  bool did_something = false;
  try {
    for (const std::string& path : v.fixtures) {
      did_something = true;
      const std::vector<JobOutcome> fx = read_fixture(path);
      if (auto f = check_outcomes(fx))
        fail(fmt::format("{}: {}: {}", path, f->identity, f->detail));
      else
        pass(fmt::format("{}: angeltveit, even-vanishing and precision checks on {} entries", path, fx.size()));
      if (v.compare) {
        std::size_t compared = 0;
        for (const auto& o : fx) {
          if (!o.result) continue;
          const long m = static_cast<long>(o.key.f) * (static_cast<long>(o.key.i) * o.key.n - 1);
          if (m > v.max_rank) continue;
          KGroupOptions opt;
          opt.eisenstein = o.key.eisenstein;
          const KGroupResult r = kgroups(o.key.p, o.key.f, o.key.n, o.key.i, opt);
          ++compared;
          if (r.h1 != o.result->h1 || r.h2 != o.result->h2) {
            fail(fmt::format("{}: golden mismatch at p={} n={} i={}: computed [{}]/[{}], fixture [{}]/[{}]", path,
                             o.key.p, o.key.n, o.key.i, join(r.h1, ","), join(r.h2, ","), join(o.result->h1, ","),
                             join(o.result->h2, ",")));
          }
        }
        pass(fmt::format("{}: recomputed {} entries with rank <= {}", path, compared, v.max_rank));
      }
    }

    if (v.nilpotence) {
      did_something = true;
      if (v.range.p == 0 || v.range.n == 0) raise(ErrorCode::InvalidArgument, "--nilpotence needs --p and --n");
      const std::vector<mpz_class> e =
          v.range.eisenstein.empty() ? std::vector<mpz_class>{1} : parse_coefficients(v.range.eisenstein);
      const int deg = static_cast<int>(e.size());
      const NilpotenceVerdict plain =
          nilpotence_witness(v.range.p, v.range.f, v.range.n, deg, e, NilpotenceMode::Plain);
      const std::string line = fmt::format("nilpotence p={} n={} e={}: z^{} = 0 mod p: {}, sharp: {}", v.range.p,
                                           v.range.n, deg, plain.exponent, plain.vanishes, plain.sharp);
      (plain.vanishes && plain.sharp) ? pass(line) : fail(line);
      const NilpotenceVerdict nyg =
          nilpotence_witness(v.range.p, v.range.f, v.range.n, deg, e, NilpotenceMode::Nygaard);
      const std::string line2 = fmt::format("nilpotence p={} n={} e={}: v^{} = 0 mod p: {}, sharp: {}", v.range.p,
                                            v.range.n, deg, nyg.exponent, nyg.vanishes, nyg.sharp);
      (nyg.vanishes && nyg.sharp) ? pass(line2) : fail(line2);
    }

    if (!v.nilpotence && v.range.p != 0) {
      did_something = true;
      std::vector<mpz_class> eisenstein;
      const std::vector<JobKey> keys = make_jobs(v.range, eisenstein);
      const std::vector<JobOutcome> outcomes =
          run_jobs(keys, options_for(v.range, eisenstein), thread_count(v.range.jobs));
      for (const auto& o : outcomes)
        if (o.error) fail(fmt::format("i={}: {}", o.key.i, o.message));
      if (auto f = check_outcomes(outcomes))
        fail(f->identity + ": " + f->detail);
      else
        pass(fmt::format("angeltveit, even-vanishing and precision checks on {} weights", outcomes.size()));
      if (v.isogeny) {
        for (const auto& k : keys) {
          if (static_cast<long>(k.i) * k.n < 2) continue;
          KGroupOptions opt = options_for(v.range, eisenstein);
          for (const IsogenyCheck& c : isogeny_checks(k.p, k.f, k.n, k.i, opt)) {
            const std::string line =
                fmt::format("isogeny {} p={} n={} i={}: {} vs {}", c.map, k.p, k.n, k.i, c.observed, c.expected);
            c.observed == c.expected ? pass(line) : fail(line);
          }
        }
      }
    }
  } catch (const Error& e) {
    return report_usage_or_failure(e, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (!did_something) {
    err << "error: nothing to verify; give --fixture, --nilpotence or --p/--n with weights\n";
    return kUsage;
  }
  if (failures > 0) {
    err << "check failed: " << failures << " failing check(s)\n";
    return kCheckFailure;
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"kchain: p-adic K-groups of finite chain rings O_K/pi^n via syntomic cohomology", "kchain"};
  app.require_subcommand(1);

  RangeFlags compute_flags;
  std::string format = "table";
  std::string out_path;
  std::string cache_path;
  CLI::App* compute = app.add_subcommand("compute", "compute K_{2i-1} and K_{2i-2} for a range of weights");
  add_range_flags(compute, compute_flags);
  compute->add_option("--format", format, "output format")->check(CLI::IsMember({"table", "json", "csv"}));
  compute->add_option("--out", out_path, "write output to this file instead of stdout");
  compute->add_option("--cache", cache_path, "JSON-lines result cache (append-only)");

  VerifyFlags verify_flags;
  CLI::App* verify = app.add_subcommand("verify", "run identity checks on fixtures or fresh computations");
  add_range_flags(verify, verify_flags.range);
  verify->add_option("--fixture", verify_flags.fixtures, "JSON-lines fixture file (repeatable)");
  verify->add_flag("--nilpotence", verify_flags.nilpotence, "certify the nilpotence witnesses for --p, --n");
  verify->add_flag("--isogeny", verify_flags.isogeny, "compare elementary-divisor sums of can, red and nabla");
  verify->add_flag("--compare", verify_flags.compare, "recompute fixture entries and compare exponents");
  verify->add_option("--max-rank", verify_flags.max_rank, "largest f(in-1) recomputed by --compare");

  // Bare flags select the compute subcommand.
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  if (!args.empty() && args[0].rfind("--", 0) == 0 && args[0] != "--help") args.insert(args.begin(), "compute");
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (*compute) return cmd_compute(compute_flags, format, out_path, cache_path, out, err);
  return cmd_verify(verify_flags, out, err);
}

}  // namespace kchain::cli
