// Copyright 2026 The kchain Authors
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "kchain/cli.hpp"

int main(int argc, char** argv) { return kchain::cli::run(argc, argv, std::cout, std::cerr); }
