// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return angspoof::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
