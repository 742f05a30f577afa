/******************************************************************************
 * Copyright 2026 The idrem Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <stdexcept>
#include <string>

namespace idrem {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must have full column rank does not.
class RankError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is singular.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// The adjugate estimate N_a is singular, so k_r cannot be recovered.
class SingularAdjugateError : public SingularMatrixError {
 public:
  using SingularMatrixError::SingularMatrixError;
};

/// Argument outside the domain of a function (e.g. negative time).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The matching condition between plant and reference model cannot be met.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// Invalid scenario configuration (bad key, bad value, violated invariant).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Adaptation state left its admissible set (e.g. nonpositive gain).
class StateCorruption : public Error {
 public:
  using Error::Error;
};

/// The integrator produced a non-finite value.
class IntegrationFault : public Error {
 public:
  IntegrationFault(const std::string& what, double time, long component)
      : Error(what), time_(time), component_(component) {}

  double time() const { return time_; }
  /// Offending index in the flat state vector, -1 if unknown.
  long component() const { return component_; }

 private:
  double time_;
  long component_;
};

}  // namespace idrem
