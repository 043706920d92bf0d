// Copyright 2026 The avwtc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace avwtc {

// Bad shapes, out-of-range parameters and violated preconditions all surface
// as std::invalid_argument. The two subclasses below let callers (and the
// CLI exit-code mapping) tell the remaining failure modes apart.

/// A probability vector is not an exact type for the requested blocklength.
class InvalidTypeError : public std::invalid_argument {
 public:
  explicit InvalidTypeError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// An enumeration or count would exceed the configured size limit.
class SizeLimitError : public std::length_error {
 public:
  explicit SizeLimitError(const std::string& what) : std::length_error(what) {}
};

/// The requested computation is outside the tractable/feasible range.
class FeasibilityError : public std::domain_error {
 public:
  explicit FeasibilityError(const std::string& what)
      : std::domain_error(what) {}
};

}  // namespace avwtc
