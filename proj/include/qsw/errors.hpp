// Copyright 2026 The qswr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qsw {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An operator would map a represented basis state outside the represented
/// excitation sectors.
class SectorViolation : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

/// A propagated state failed the post-hoc density-matrix checks.
class ToleranceNotMet : public Error {
 public:
  using Error::Error;
};

/// Two transitions (a_lower -> a_upper) and (b_lower -> b_upper) whose Bohr
/// frequencies coincide within the frequency tolerance. A zero-frequency
/// degeneracy (two equal eigenvalues) is reported with b_lower == b_upper.
struct DegeneratePair {
  std::size_t a_lower = 0;
  std::size_t a_upper = 0;
  std::size_t b_lower = 0;
  std::size_t b_upper = 0;
  double separation = 0.0;
};

/// The secular approximation is invalid: transition frequencies are degenerate.
class DegenerateTransitions : public Error {
 public:
  DegenerateTransitions(const std::string& what, std::vector<DegeneratePair> pairs)
      : Error(what), pairs_(std::move(pairs)) {}
  const std::vector<DegeneratePair>& pairs() const noexcept { return pairs_; }

 private:
  std::vector<DegeneratePair> pairs_;
};

/// The Liouvillian has more than one stationary state. Carries a basis of the
/// null space, reshaped to d x d matrices.
class DegenerateSteadyState : public Error {
 public:
  DegenerateSteadyState(const std::string& what, std::vector<Eigen::MatrixXcd> solutions)
      : Error(what), solutions_(std::move(solutions)) {}
  const std::vector<Eigen::MatrixXcd>& solutions() const noexcept { return solutions_; }

 private:
  std::vector<Eigen::MatrixXcd> solutions_;
};

/// An engineering target that the coupling kind cannot produce.
class InvalidTarget : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration rejected; path() locates the offending entry.
class ConfigInvalid : public Error {
 public:
  ConfigInvalid(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace qsw
