// Copyright 2026 The hybridsim Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace hybridsim {

/// Raised when a truncated Fock space loses more weight than allowed.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, double leaked_weight)
        : std::runtime_error(what), leaked_weight_(leaked_weight) {}

    [[nodiscard]] double leaked_weight() const noexcept { return leaked_weight_; }

  private:
    double leaked_weight_;
};

/// Propagator failure, positivity loss, non-Hermitian generator.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration input; `line` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    [[nodiscard]] int line() const noexcept { return line_; }

  private:
    int line_;
};

struct ConvergenceWarning {
    std::string message;
    double leaked_weight{0.0};
};

using WarningSink = std::function<void(const ConvergenceWarning&)>;

/// Writes to stderr.
WarningSink stderr_warnings();

/// Discards everything.
WarningSink ignore_warnings();

} // namespace hybridsim
