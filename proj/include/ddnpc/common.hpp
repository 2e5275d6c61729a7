/*
 Copyright 2026 The ddnpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddnpc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Seed = std::uint64_t;

// Error hierarchy. Everything derives from Error so callers can catch once.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch or another violated call contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Bad argument value (negative bound, L > N, empty grid, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A data precondition (persistency of excitation, rank) does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration (schema, ranges, unknown ids).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Throws ContractError unless `cond` holds.
inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractError(what);
}

/// Component-wise box [lower, upper].
struct Box {
  Vector lower;
  Vector upper;

  [[nodiscard]] Eigen::Index dim() const { return lower.size(); }
  [[nodiscard]] bool contains(const Vector& v, double tol = 0.0) const {
    return v.size() == lower.size() && (v.array() >= lower.array() - tol).all() &&
           (v.array() <= upper.array() + tol).all();
  }
  static Box symmetric(Eigen::Index dim, double half_width) {
    return {Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width)};
  }
};

}  // namespace ddnpc
