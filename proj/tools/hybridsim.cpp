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


// hybridsim <config-path> [--out DIR] [--threads N] [--allow-nonconverged]
//
// Exit codes: 0 success, 1 I/O or unexpected failure, 2 config error,
// 3 convergence error, 4 numerical failure.

#include <iostream>

#include <CLI11.hpp>

#include "hybridsim/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Atom + cavity + movable mirror simulator"};
    std::string config_path;
    std::string out_dir;
    int threads = 1;
    bool allow_nonconverged = false;
    app.add_option("config", config_path, "Run configuration (key = value)")->required();
    app.add_option("--out", out_dir, "Output directory (overrides out_dir)");
    app.add_option("--threads", threads, "Worker threads for sweeps and Wigner grids")->check(CLI::PositiveNumber);
    app.add_flag("--allow-nonconverged", allow_nonconverged, "Write results even if the truncation check fails");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const hybridsim::RunConfig cfg = hybridsim::load_config(config_path);
        hybridsim::RunOptions opts;
        if (!out_dir.empty())
            opts.out_dir = out_dir;
        opts.threads = threads;
        opts.allow_nonconverged = allow_nonconverged;
        const auto summary = hybridsim::run(cfg, opts);
        for (const auto& f : summary.files)
            std::cout << f << '\n';
        if (!summary.converged)
            std::cerr << "warning: truncation not converged (results written on request)\n";
        return 0;
    } catch (const hybridsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const hybridsim::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return 3;
    } catch (const hybridsim::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
