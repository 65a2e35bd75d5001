// Copyright 2026 The MSA Authors.
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

#ifndef MSA_ERRORS_H_
#define MSA_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msa {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed parameters: bad weights, quota > n, empty inputs, p = 0, ...
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Coalition width, tensor shape or matrix dimensions do not agree.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// A partial tabular game was queried at a coalition it does not contain.
class MissingEntry : public Error {
 public:
  using Error::Error;
};

// A NaN or infinity was produced or read where only finite values are
// admitted.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

// Exact enumeration requested for more players than the configured cap.
class CapExceeded : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Input file could not be parsed. `line()` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : "") + ": " +
              what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A game evaluation failed inside the Shapley engine. Carries the offending
// coalition as a bitstring (leftmost char = player 0).
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& coalition, const std::string& what)
      : Error("evaluation failed at coalition " + coalition + ": " + what),
        coalition_(coalition) {}
  const std::string& coalition() const { return coalition_; }

 private:
  std::string coalition_;
};

}  // namespace msa

#endif  // MSA_ERRORS_H_
