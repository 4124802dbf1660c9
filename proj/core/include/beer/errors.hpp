// Copyright 2026 The beerlab Authors. All Rights Reserved.
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
// =============================================================================

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace beer {

// Shape or argument mismatch inside the numerical core.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A malformed experiment configuration. `field` is the dotted path of the
// offending entry (e.g. "topology.n").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Unreadable or malformed dataset. `line` is 1-based, 0 when not applicable.
class DataError : public std::runtime_error {
 public:
  DataError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " +
                                           what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Iterates blew up (non-finite entry or ||X||_F > 1e12).
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(std::int64_t round)
      : std::runtime_error("divergence detected at round " +
                           std::to_string(round)),
        round_(round) {}
  std::int64_t round() const noexcept { return round_; }

 private:
  std::int64_t round_;
};

}  // namespace beer
