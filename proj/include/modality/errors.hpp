// Copyright 2026 The Modality Engine Authors
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

#include <stdexcept>
#include <string>

namespace modality {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotUnitary : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

/// Raised when an observable has (near-)degenerate eigenvalues, so its
/// eigenprojectors cannot all be rank one.
class DegenerateObservable : public Error {
 public:
  using Error::Error;
};

/// Raised by the least-squares density fit when the sample projectors do not
/// determine a Hermitian matrix.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// A computed quantity left its admissible range by more than rounding
/// allows. Indicates a bug, not bad input.
class NumericalInconsistency : public Error {
 public:
  using Error::Error;
};

class UnknownScenario : public Error {
 public:
  using Error::Error;
};

class MissingParameter : public Error {
 public:
  MissingParameter(const std::string& name)
      : Error("missing parameter '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace modality
