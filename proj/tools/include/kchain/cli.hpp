// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kchain/syntomic.hpp"

namespace kchain::cli {

enum ExitCode : int { kOk = 0, kCheckFailure = 1, kUsage = 2 };

// Identity of one computation: the cache is keyed on it.
struct JobKey {
  unsigned p = 2;
  unsigned f = 1;
  int n = 1;
  int i = 1;
  std::vector<mpz_class> eisenstein;  // non-constant part, low-to-high
  unsigned W = 0;                     // working precision actually requested

  std::uint64_t hash() const;
  bool operator==(const JobKey& other) const;
  bool operator<(const JobKey& other) const;
};

// Result of one job: either a KGroupResult or an error code.
struct JobOutcome {
  JobKey key;
  std::optional<KGroupResult> result;
  std::optional<ErrorCode> error;
  std::string message;
};

nlohmann::ordered_json to_json(const JobOutcome& outcome);
JobOutcome outcome_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const KGroupResult& r);
KGroupResult result_from_json(const nlohmann::json& j);

// One JSON object per line, in job order.
std::string emit_json(const std::vector<JobOutcome>& outcomes);
std::string emit_csv(const std::vector<JobOutcome>& outcomes);
// Grid of K_r rows by ring columns: tab-separated, comma-separated exponent
// lists, blank for zero groups and "x" for failed computations.
std::string emit_table(const std::vector<JobOutcome>& outcomes);

// Column heading used by emit_table, e.g. "Z/2^3".
std::string ring_label(unsigned p, unsigned f, int n, const std::vector<mpz_class>& eisenstein);

// Append-only JSON-lines cache of finished jobs.
class ResultCache {
 public:
  explicit ResultCache(std::string path);

  const std::string* find(const JobKey& key) const;
  void append(const JobKey& key, const std::string& line);
  std::size_t size() const { return lines_.size(); }

 private:
  std::string path_;
  std::map<JobKey, std::string> lines_;
};

// Reads a JSON-lines fixture file.
std::vector<JobOutcome> read_fixture(const std::string& path);

struct CheckFailure {
  std::string identity;
  std::string detail;
};

// Angeltveit identity, even vanishing beyond the certified threshold, and
// precision honesty of a list of results. Returns the first violation.
std::optional<CheckFailure> check_outcomes(const std::vector<JobOutcome>& outcomes);

// Parses comma-separated integers such as "1,0,3".
std::vector<mpz_class> parse_coefficients(const std::string& text);

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kchain::cli
