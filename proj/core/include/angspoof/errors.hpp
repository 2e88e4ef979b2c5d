// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#ifndef ANGSPOOF_ERRORS_HPP
#define ANGSPOOF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace angspoof {

/// Dimension mismatch, empty inputs, out-of-range indices.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coincident BS / UE / scatterer positions.
class DegenerateGeometry : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value appeared inside an iterative solver.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace angspoof

#endif  // ANGSPOOF_ERRORS_HPP
