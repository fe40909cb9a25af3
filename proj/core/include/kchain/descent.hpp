// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "kchain/envelope.hpp"
#include "kchain/linalg.hpp"

namespace kchain {

// Envelopes and relation tables shared by every map of one weight-i computation.
struct DescentContext {
  WittRingPtr ring;
  int n = 1;
  int e = 1;
  int i = 1;
  int B = 0;  // i*n - 1
  std::vector<WittScalar> E;
  std::shared_ptr<Envelope> okOne;  // W[[z0]]
  std::shared_ptr<Envelope> okTwo;  // two-variable envelope of O_K
  std::shared_ptr<Envelope> quot;   // envelope of O_K/pi^n
  std::vector<Element> lambda;
  RelationTables fTables;
  RelationTables gTables;
  PrecisionLedger ledger;  // minimum over both table families
};

// Builds all envelopes and tables. Requires i*n >= 2.
DescentContext make_descent_context(WittRingPtr ring, int n, const std::vector<WittScalar>& E, int i);

// w(u) = 1 + phi((E(z1) - E(z0)) / (z1 - z0)) * phi_1(g0) in the two-variable envelope.
Element unit_wu(const DescentContext& ctx);
// Fixed point of x = w(u) * phi(x), starting from w(u).
Element unit_wv(const DescentContext& ctx, const Element& wu);

// Connection on F^{[1,B]} of W[[z0]] with values in F^{[0,B-1]}: column k holds
// the g0-coefficient of w(v)^i (z0 + g0)^k.
PadicMatrix nabla_OK(const DescentContext& ctx, const Element& wv);

struct ReductionMatrices {
  PadicMatrix red;        // z0^k, 1 <= k <= B, in the quotient basis of weights 1..B
  PadicMatrix red_nabla;  // z0^k, 0 <= k <= B-1, in the basis of weights 0..B-1
};
ReductionMatrices reduction_matrices(const DescentContext& ctx);

// Connection of the quotient: the X with X * red = red_nabla * nabla_OK.
PadicMatrix nabla_R(const ReductionMatrices& red, const PadicMatrix& nablaOK);

// Nygaard lift: the X with can_tgt * X = nabla_R * can_src.
PadicMatrix nygaard_nabla(const PadicMatrix& can_tgt, const PadicMatrix& nablaR, const PadicMatrix& can_src);

// Expands envelope columns into a Z_p-matrix. Row r of the result reads the
// coordinate of envelope index row_index[r].
PadicMatrix columns_to_matrix(const Envelope& env, const std::vector<Element>& columns,
                              const std::vector<std::size_t>& row_index, bool sigma_twist, unsigned valid);

}  // namespace kchain
