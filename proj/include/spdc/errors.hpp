// Copyright 2026 The spdc-design Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace spdc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A wavelength (or other argument) lies outside a dispersion model's validity range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument's domain was violated (e.g. signal <= pump).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A bracketed root search was given a bracket without a sign change.
class BracketError : public Error {
 public:
  BracketError(const std::string& what, double f_lo, double f_hi)
      : Error(what), f_lo_(f_lo), f_hi_(f_hi) {}
  double f_lo() const { return f_lo_; }
  double f_hi() const { return f_hi_; }

 private:
  double f_lo_;
  double f_hi_;
};

/// A quadrature did not converge at the requested discretization.
class DiscretizationError : public Error {
 public:
  DiscretizationError(const std::string& what, int suggested_slices)
      : Error(what), suggested_slices_(suggested_slices) {}
  int suggested_slices() const { return suggested_slices_; }

 private:
  int suggested_slices_;
};

/// Malformed or invalid configuration / data file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace spdc
