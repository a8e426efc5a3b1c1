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


// config.hpp: flat `key = value` run configuration.
//
// One pair per line, `#` starts a comment, keys are snake_case. Lists are
// comma separated. Unknown, duplicate or malformed keys are rejected with the
// offending line number. β is given directly; χ = β·ν is derived.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridsim/analysis.hpp"
#include "hybridsim/dynamics.hpp"
#include "hybridsim/model.hpp"
#include "hybridsim/wigner.hpp"

namespace hybridsim {

enum class Experiment { Evolve, Master, Wigner, SweepBeta, ScanInitial, Limits };
enum class LimitsRegime { SlowRabi, SmallBeta };

std::string_view to_string(Experiment e);
std::string_view to_string(LimitsRegime r);
std::string_view to_string(FReference r);

struct RunConfig {
    Experiment experiment{Experiment::Evolve};

    // System
    double omega{0.0};
    double nu{1.0};
    double g{0.0};
    double beta{0.0};
    double kappa{0.0};
    double Gamma{0.0};
    double gamma{0.0};
    double mbar{0.0}; // bath occupation

    // Truncation
    int n_cav{3};
    int n_mec{40};

    // Time grid (units of τ); t_end_tau unset means the experiment default
    double t_start_tau{0.0};
    std::optional<double> t_end_tau;
    int n_samples{501};

    // Initial mechanical state D(α) thermal(m̄₀) D†(α); atom in |e⟩, cavity empty
    double alpha_re{0.0};
    double alpha_im{0.0};
    double initial_mbar{0.0};

    std::vector<double> snapshot_times_tau;
    PhaseSpaceGrid wigner_grid{};

    // Sweeps
    std::vector<double> beta_values;
    std::vector<double> alpha_values;
    std::vector<double> mbar_values;
    FReference f_reference{FReference::Matched};
    int f_n_angles{8};
    double f_t_max_tau{1.2};
    int f_n_samples{601};

    LimitsRegime regime{LimitsRegime::SlowRabi};
    LindbladMethod method{LindbladMethod::Auto};

    bool convergence_check{true};
    bool allow_nonconverged{false};
    bool deterministic{true};
    std::string out_dir{"."};

    [[nodiscard]] SystemParams system() const;
    [[nodiscard]] TimeGrid time_grid(double default_end_tau = 5.0) const;
    /// Throws ConfigError (line 0) on inconsistent values.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Text that parse_config maps back to an equal RunConfig.
std::string serialize_config(const RunConfig& cfg);

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

struct RunOptions {
    std::optional<std::string> out_dir; // overrides cfg.out_dir
    int threads{1};
    bool allow_nonconverged{false};     // ORed with cfg.allow_nonconverged
};

struct RunSummary {
    std::vector<std::string> files; // written, relative to the output directory
    bool converged{true};
};

/// Runs the experiment and writes its files. Throws ConfigError,
/// ConvergenceError (non-converged truncation without permission) and
/// NumericalError; I/O failures are std::runtime_error.
RunSummary run(const RunConfig& cfg, const RunOptions& opts = {});

} // namespace hybridsim
