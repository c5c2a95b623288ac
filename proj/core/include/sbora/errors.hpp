// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sbora {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (feature widths, basis dimension, matrix sizes).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Rank outside [1, dim].
class InvalidRankError : public Error {
 public:
  using Error::Error;
};

/// Two same-side standard-basis adapters share an index.
class OrthogonalityError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value where a finite one is required, or a counter overflow.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Loss became non-finite during optimization.
class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Malformed or mismatched checkpoint file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbora
