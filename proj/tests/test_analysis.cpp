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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hybridsim/analysis.hpp"
#include "support.hpp"

using namespace hybridsim;
using hybridsim::testing::Gen;
using hybridsim::testing::uniform;

namespace {

constexpr double kTau = 2.0 * M_PI;

SystemParams params(double g, double beta) {
    SystemParams p;
    p.g = g;
    p.set_beta(beta);
    return p;
}

EvolutionRecord record_of(const std::vector<double>& t, const std::vector<double>& pe) {
    EvolutionRecord r;
    for (std::size_t i = 0; i < t.size(); ++i) {
        Observables o;
        o.P_e = pe[i];
        r.push(t[i], o);
    }
    return r;
}

EvolutionRecord full_run(double g, double beta, int n_mec, double t_end, int n) {
    const TruncationScheme tr(3, n_mec);
    const Ket psi0 = product_state(kExcited, 0, make_fock(Factor::Mechanics, 0, tr), tr);
    return evolve_unitary(build_h_total(params(g, beta), tr), psi0, TimeGrid{0, t_end, n});
}

MeasureFOptions small_f_options() {
    MeasureFOptions o;
    o.n_mec = 30;
    o.n_angles = 4;
    return o;
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("slow-Rabi weights at t = 0 and at full transfer") {
    const SystemParams p = params(0.01, 1.0);
    const RwaWeights w0 = rwa_weights(0.0, p);
    CHECK(w0.stay == 1.0);
    CHECK(w0.transfer == 0.0);
    const double omega = rwa_omega(p);
    CHECK(omega == doctest::Approx(-0.02 * std::exp(-0.5)));
    const RwaWeights w1 = rwa_weights(M_PI / std::abs(omega), p);
    CHECK(w1.transfer == doctest::Approx(1.0).epsilon(1e-12));

    const TruncationScheme tr(3, 30);
    const RwaReducedStates s0 = rwa_reduced_states(0.0, p, tr);
    CHECK(std::abs(s0.mechanics.matrix()(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(s0.atom_cavity.matrix()(kExcited * 3, kExcited * 3) - 1.0) < 1e-15);

    const RwaReducedStates s1 = rwa_reduced_states(M_PI / std::abs(omega), p, tr);
    const Eigen::VectorXcd d1 = displacement_matrix(1.0, 30).col(1);
    CHECK((s1.mechanics.matrix() - d1 * d1.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(s1.atom_cavity.matrix()(kGround * 3 + 1, kGround * 3 + 1) - 1.0) < 1e-12);
}

TEST_CASE("effective slow-Rabi Hamiltonian reproduces the analytic population") {
    const SystemParams p = params(0.01, 1.0);
    const TruncationScheme tr(3, 40);
    const double period_tau = 2.0 * M_PI / std::abs(rwa_omega(p)) / kTau;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(80);
    v(40) = 1.0; // |e,0⟩ ⊗ |0⟩
    const Ket psi0(Space{{Factor::Polariton, 2}, {Factor::Mechanics, 40}}, v);
    const EvolutionRecord r = evolve_unitary(build_h_rwa(p, tr), psi0, TimeGrid{0, period_tau, 801});
    double err = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        err = std::max(err, std::abs(r.P_e[i] - rwa_weights(r.t_over_tau[i] * kTau, p).stay));
    CHECK(err < 2e-2);
}

TEST_CASE("full model in the slow-Rabi regime gives the predicted reduced mechanics") {
    const SystemParams p = params(0.01, 1.0);
    const TruncationScheme tr(3, 30);
    const double t = 0.3 * M_PI / std::abs(rwa_omega(p));
    const Ket psi0 = product_state(kExcited, 0, make_fock(Factor::Mechanics, 0, tr), tr);
    const UnitaryPropagator prop(build_h_total(p, tr));
    const DensityOperator mu = reduced_mechanics(prop.evolve(psi0, t));
    const RwaReducedStates expect = rwa_reduced_states(t, p, tr);
    // populations of the Fock basis; coherences rotate at ν and are averaged out by the RWA
    for (int m = 0; m < 6; ++m)
        CHECK(std::abs(mu.matrix()(m, m) - expect.mechanics.matrix()(m, m)) < 2e-2);
}

TEST_CASE("perturbative population examples") {
    const SystemParams p = params(0.5, 0.1);
    CHECK(perturbative_pe(0.0, p) == 1.0);
    CHECK(perturbative_pe(M_PI, p) == doctest::Approx(0.5 * (1.0 - std::cos(0.05 * M_PI))));
    CHECK(perturbative_pe(M_PI, p) == doctest::Approx(0.00616).epsilon(1e-3));
}

TEST_CASE("perturbative state") {
    const SystemParams p = params(0.5, 0.1);
    const TruncationScheme tr(3, 20);
    const Ket start = perturbative_state(0.0, p, 6, tr);
    const Ket target = product_state(kExcited, 0, make_fock(Factor::Mechanics, 0, tr), tr);
    CHECK(std::abs(std::abs(lift_pair_state(start, tr).amplitudes().dot(target.amplitudes())) - 1.0) < 1e-10);

    for (double t : {0.7, 3.0, 11.0}) {
        const Ket a = perturbative_state(t, p, 6, tr), b = perturbative_state(t, p, 12, tr);
        CHECK(std::abs(a.amplitudes().dot(b.amplitudes())) > 1.0 - 1e-8);
    }
    CHECK_THROWS_AS(perturbative_state(0.0, p, 19, tr), std::invalid_argument);
}

TEST_CASE("moving average") {
    const std::vector<double> flat(20, 0.3);
    for (double v : moving_average(flat, 5))
        CHECK(v == doctest::Approx(0.3));
    const auto ramp = moving_average({0, 1, 2, 3, 4, 5, 6}, 3);
    CHECK(ramp[3] == doctest::Approx(3.0));
    CHECK(ramp.size() == 7);
}

TEST_CASE("revival report on the unperturbed and suppressed runs") {
    const EvolutionRecord rabi = full_run(1.0, 0.0, 10, 3, 601);
    const RevivalReport r0 = revival_report(rabi, params(1.0, 0.0));
    REQUIRE(r0.T_n.size() >= 5);
    for (std::size_t n = 0; n < 5; ++n)
        CHECK(std::abs(r0.T_n[n] - (n + 1) * M_PI) < 0.005 * kTau);
    for (double m : r0.m_tilde)
        CHECK(m == 0.0);

    const EvolutionRecord supp = full_run(1.0, 1.0, 40, 3, 601);
    const RevivalReport r1 = revival_report(supp, params(1.0, 1.0));
    REQUIRE(!r1.dominant_tau.empty());
    const auto first = std::find_if(r1.dominant_tau.begin(), r1.dominant_tau.end(), [](double t) { return t > 0.5; });
    REQUIRE(first != r1.dominant_tau.end());
    CHECK(*first == doctest::Approx(1.2).epsilon(0.1));
    CHECK(r1.window_min < 0.3);
}

TEST_CASE("F quadrature on synthetic records") {
    std::vector<double> t(601);
    for (int i = 0; i < 601; ++i)
        t[i] = 1.2 * i / 600.0;
    const EvolutionRecord zero = record_of(t, std::vector<double>(601, 0.0));
    const EvolutionRecord half = record_of(t, std::vector<double>(601, 0.5));
    CHECK(f_integral(zero, half, 1.2) == doctest::Approx(0.25 * 1.2 * kTau));
    CHECK(f_integral(zero, half, 1.2, 2) == doctest::Approx(0.25 * 1.2 * kTau));
    CHECK(f_integral(zero, half, 0.6) == doctest::Approx(0.25 * 0.6 * kTau));
    CHECK(f_integral(half, half, 1.2) == 0.0);
    const EvolutionRecord short_rec = record_of({0.0, 0.1}, {0.0, 0.0});
    CHECK_THROWS_AS(f_integral(zero, short_rec, 1.2), std::invalid_argument);
}

TEST_CASE("phonon number variance and its contours") {
    CHECK(phonon_number_variance(1.0, 2.0) == doctest::Approx(11.0));
    CHECK(phonon_number_variance(0.0, 0.0) == 0.0);
    for (double level : {1.0, 2.75, 6.0})
        for (const auto& [a, m] : variance_contour(level, {0.0, 0.5, 1.0, 1.5, 2.0}))
            CHECK(phonon_number_variance(a, m) == doctest::Approx(level));
    CHECK(variance_contour(1.0, {2.0}).empty());
}

TEST_CASE("measure_f vanishes for the reference state") {
    SystemParams p = params(1.0, 1.0);
    p.kappa = p.Gamma = 0.05;
    const MeasureFResult r = measure_f(0.0, 0.0, p, small_f_options());
    CHECK(r.F == 0.0);
    for (double f : r.per_angle)
        CHECK(f == 0.0);
    CHECK_THROWS_AS(measure_f(-1.0, 0.0, p, small_f_options()), std::invalid_argument);
}

TEST_CASE("sweep specification ordering and validation") {
    SweepSpec s;
    s.axes = {{SweepParameter::AlphaMag, {0.0, 0.5}}, {SweepParameter::Mbar, {0.0, 1.0, 2.0}}};
    CHECK(s.n_points() == 6);
    CHECK(s.point(0) == std::vector<double>{0.0, 0.0});
    CHECK(s.point(1) == std::vector<double>{0.0, 1.0});
    CHECK(s.point(5) == std::vector<double>{0.5, 2.0});
    CHECK(sweep_parameter_from_string(to_string(SweepParameter::Mbar)) == SweepParameter::Mbar);
    CHECK_THROWS_AS(sweep_parameter_from_string("omega"), std::invalid_argument);
    s.axes.push_back({SweepParameter::Beta, {}});
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("beta sweep over zero reproduces the unperturbed Rabi record") {
    SweepSpec s;
    s.axes = {{SweepParameter::Beta, {0.0}}};
    s.base = params(1.0, 0.0);
    s.grid = TimeGrid{0, 2, 201};
    s.n_mec = 10;
    const auto rows = run_sweep(s);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status == "ok");
    REQUIRE(rows[0].record.has_value());
    const EvolutionRecord direct = full_run(1.0, 0.0, 10, 2, 201);
    for (std::size_t i = 0; i < direct.size(); ++i)
        CHECK(rows[0].record->P_e[i] == doctest::Approx(direct.P_e[i]).epsilon(1e-12));
    REQUIRE(rows[0].revivals.has_value());
}

TEST_CASE("sweep results do not depend on the thread count") {
    SweepSpec s;
    s.axes = {{SweepParameter::Beta, {0.0, 0.5, 1.0, 1.5}}};
    s.base = params(1.0, 0.0);
    s.grid = TimeGrid{0, 1, 51};
    s.n_mec = 20;
    const auto a = run_sweep(s, 1), b = run_sweep(s, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].coords == b[k].coords);
        CHECK(a[k].record->P_e == b[k].record->P_e);
    }
}

} // TEST_SUITE("analysis")

TEST_SUITE("properties") {

TEST_CASE("analysis: slow-Rabi weights sum to one") {
    Gen gen(501);
    for (int trial = 0; trial < 200; ++trial) {
        const SystemParams p = params(uniform(gen, 0.001, 0.1), uniform(gen, 0.0, 3.0));
        const double t = uniform(gen, 0.0, 5000.0);
        const RwaWeights w = rwa_weights(t, p);
        CHECK(std::abs(w.stay + w.transfer - 1.0) < 1e-14);
        CHECK(w.stay >= 0.0);
        CHECK(w.transfer >= 0.0);
        if (trial % 20 == 0) {
            const RwaReducedStates s = rwa_reduced_states(t, p, TruncationScheme(3, 40));
            CHECK(std::abs(s.mechanics.trace() - 1.0) < 1e-8);
            CHECK(std::abs(s.atom_cavity.trace() - 1.0) < 1e-14);
        }
    }
}

TEST_CASE("analysis: perturbative population stays in [0, 1]") {
    Gen gen(502);
    for (int trial = 0; trial < 500; ++trial) {
        const SystemParams p = params(0.5, uniform(gen, 0.0, 3.0));
        const double pe = perturbative_pe(uniform(gen, 0.0, 500.0), p);
        CHECK(pe >= 0.0);
        CHECK(pe <= 1.0);
    }
}

TEST_CASE("analysis: revivals of cos^2(gt) sit at n pi / g") {
    Gen gen(503);
    for (int trial = 0; trial < 10; ++trial) {
        const double g = uniform(gen, 0.4, 1.6);
        const int n = 1201;
        const double t_end = 4.0;
        std::vector<double> t(n), pe(n);
        for (int i = 0; i < n; ++i) {
            t[i] = t_end * i / (n - 1);
            pe[i] = std::pow(std::cos(g * t[i] * kTau), 2);
        }
        const RevivalReport r = revival_report(record_of(t, pe), params(g, 0.0));
        const double step = t_end / (n - 1) * kTau;
        REQUIRE(!r.T_n.empty());
        for (std::size_t k = 0; k < r.T_n.size(); ++k) {
            INFO("g = " << g << ", k = " << k);
            CHECK(std::abs(r.T_n[k] - (k + 1) * M_PI / g) <= step);
        }
    }
}

TEST_CASE("analysis: F does not depend on how the reference run is obtained") {
    SystemParams p = params(1.0, 1.0);
    p.kappa = p.Gamma = 0.05;
    const MeasureFOptions opts = small_f_options();
    const EvolutionRecord ref = f_reference_run(p, opts);
    const double inner = measure_f(0.5, 1.0, p, opts).F;
    const double outer = measure_f(0.5, 1.0, p, opts, &ref).F;
    CHECK(std::abs(inner - outer) < 1e-10);
    CHECK(inner > 0.0);
}

} // TEST_SUITE("properties")
