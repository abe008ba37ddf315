// Copyright 2026 The phasemem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace phasemem {

/// Bad input: invalid configuration, malformed file, out-of-range index.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical kernel failed (non-convergence, rejected matrix).
class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reaction-data fit could not be performed on the given data.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phasemem
