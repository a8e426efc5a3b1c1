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


#include "hybridsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hybridsim {

// ---------------------------------------------------------------------------
// Slow-Rabi limit

double rwa_omega(const SystemParams& p) {
    return 2.0 * p.g * f_factor(0, p.beta());
}

RwaWeights rwa_weights(double t, const SystemParams& p) {
    const double omega = rwa_omega(p);
    const double beta = p.beta();
    const double delta = (beta * beta - 1.0) * p.nu;
    double sin2_theta;
    if (beta == 1.0)
        sin2_theta = omega == 0.0 ? 0.0 : 1.0;
    else
        sin2_theta = omega * omega / (omega * omega + delta * delta);
    const double w = 0.5 * std::hypot(omega, delta);
    const double s = std::sin(w * t);
    const double transfer = sin2_theta * s * s;
    return {1.0 - transfer, transfer};
}

RwaReducedStates rwa_reduced_states(double t, const SystemParams& p, const TruncationScheme& trunc) {
    const RwaWeights w = rwa_weights(t, p);
    const int n = trunc.n_mec();
    const Eigen::VectorXcd displaced_one = displacement_matrix(cplx{p.beta(), 0.0}, n).col(1);
    Eigen::MatrixXcd mu = w.transfer * displaced_one * displaced_one.adjoint();
    mu(0, 0) += w.stay;

    const int nc = trunc.n_cav();
    Eigen::MatrixXcd ac = Eigen::MatrixXcd::Zero(2 * nc, 2 * nc);
    ac(kExcited * nc + 0, kExcited * nc + 0) = w.stay;
    ac(kGround * nc + 1, kGround * nc + 1) = w.transfer;
    return {DensityOperator(Space::mechanics(n), std::move(mu)),
            DensityOperator(Space{{Factor::Atom, 2}, {Factor::Cavity, nc}}, std::move(ac))};
}

// ---------------------------------------------------------------------------
// Small-β limit

double perturbative_pe(double t, const SystemParams& p) {
    const double nt = p.nu * t;
    return 0.5 * (1.0 + std::cos(0.5 * p.beta() * nt) * std::cos(nt));
}

Ket perturbative_state(double t, const SystemParams& p, int m_max, const TruncationScheme& trunc) {
    if (m_max < 0)
        throw std::invalid_argument("perturbative_state: m_max must be >= 0");
    const int n = trunc.n_mec();
    if (m_max + 1 >= n)
        throw std::invalid_argument("perturbative_state: m_max + 1 must be below n_mec");
    const double beta = p.beta();
    const double nt = p.nu * t;
    const cplx i{0.0, 1.0};
    const cplx up = std::exp(0.5 * i * nt);    // e^{iνt/2}
    const cplx down = std::exp(-0.5 * i * nt); // e^{−iνt/2}
    constexpr int plus = 0, minus = 1;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * n);
    for (int m = 0; m <= m_max; ++m) {
        const cplx c = std::exp(-beta * beta / 8.0) * std::pow(-0.5 * beta * std::exp(-i * nt), m) /
                       std::sqrt(2.0 * std::tgamma(m + 1.0));
        const double a = std::sqrt(static_cast<double>(m)) * 0.5 * beta * nt;
        const double b = std::sqrt(m + 1.0) * 0.5 * beta * nt;
        if (m >= 1)
            v(plus * n + m - 1) += c * (-i * std::sin(a)) * up;
        v(plus * n + m) += c * std::cos(b) * down;
        v(minus * n + m) -= c * std::cos(a) * up;
        v(minus * n + m + 1) += c * i * std::sin(b) * down;
    }
    v.normalize();
    const Eigen::MatrixXcd d = displacement_matrix(cplx{0.5 * beta, 0.0}, n);
    v.head(n) = d * v.head(n).eval();
    v.tail(n) = d * v.tail(n).eval();
    return {Space{{Factor::Dressed, 2}, {Factor::Mechanics, n}}, v.normalized()};
}

// ---------------------------------------------------------------------------
// Revivals

std::vector<double> moving_average(const std::vector<double>& y, int width) {
    if (width < 1)
        throw std::invalid_argument("moving_average: width must be >= 1");
    const int n = static_cast<int>(y.size());
    const int half = width / 2;
    std::vector<double> prefix(n + 1, 0.0);
    for (int i = 0; i < n; ++i)
        prefix[i + 1] = prefix[i] + y[i];
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        // shrink symmetrically at the ends so peaks near the edges do not move
        const int h = std::min({half, i, n - 1 - i});
        const int lo = i - h;
        const int hi = i + h;
        out[i] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
    }
    return out;
}

namespace {

std::vector<int> local_maxima(const std::vector<double>& y) {
    std::vector<int> idx;
    const int n = static_cast<int>(y.size());
    for (int i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1]))
            continue;
        // Flat tops: walk to the end of the plateau and require a drop.
        int j = i;
        while (j + 1 < n && y[j + 1] == y[i])
            ++j;
        if (j + 1 < n && y[j + 1] < y[i])
            idx.push_back((i + j) / 2);
        i = j;
    }
    return idx;
}

// Topographic prominence: height above the higher of the two lowest points
// separating the peak from higher ground (or the record ends).
double prominence_of(const std::vector<double>& y, int i) {
    const int n = static_cast<int>(y.size());
    double left = y[i];
    for (int j = i - 1; j >= 0 && y[j] <= y[i]; --j)
        left = std::min(left, y[j]);
    double right = y[i];
    for (int j = i + 1; j < n && y[j] <= y[i]; ++j)
        right = std::min(right, y[j]);
    return y[i] - std::max(left, right);
}

} // namespace

RevivalReport revival_report(const EvolutionRecord& record, const SystemParams& p, const RevivalOptions& opts) {
    RevivalReport rep;
    if (record.size() < 3) {
        rep.diagnostic = "record has fewer than three samples";
        return rep;
    }
    const double dt = record.t_over_tau[1] - record.t_over_tau[0];
    int width = std::max(1, static_cast<int>(std::lround(opts.smoothing_tau / dt)));
    if (width % 2 == 0)
        ++width;
    rep.smoothed = moving_average(record.P_e, width);

    for (int i : local_maxima(record.P_e))
        rep.raw_maxima_tau.push_back(record.t_over_tau[i]);

    const double tau = p.tau();
    const double beta = p.beta();
    // Near the ends the window shrinks and pulls maxima towards the edge;
    // only maxima with a full window are reported.
    const int half = width / 2;
    const int last = static_cast<int>(record.size()) - 1 - half;
    int n = 0;
    for (int i : local_maxima(rep.smoothed)) {
        if (i < half || i > last)
            continue;
        ++n;
        const double t = record.t_over_tau[i];
        const double prom = prominence_of(rep.smoothed, i);
        rep.maxima_tau.push_back(t);
        rep.maxima_value.push_back(rep.smoothed[i]);
        rep.prominence.push_back(prom);
        if (prom >= opts.min_prominence && rep.smoothed[i] >= opts.min_height)
            rep.dominant_tau.push_back(t);
        const double tn = t * tau;
        rep.T_n.push_back(tn);
        rep.m_tilde.push_back(beta == 0.0 || p.g == 0.0 ? 0.0
                                                        : (1.0 - tn * p.g / (n * std::numbers::pi)) * 2.0 / (beta * beta));
    }
    for (std::size_t i = 0; i < record.size(); ++i) {
        const double t = record.t_over_tau[i];
        if (t >= opts.window_start_tau - 1e-12 && t <= opts.window_end_tau + 1e-12)
            rep.window_min = std::isnan(rep.window_min) ? record.P_e[i] : std::min(rep.window_min, record.P_e[i]);
    }
    if (rep.maxima_tau.empty())
        rep.diagnostic = "no local maxima in the smoothed population";
    return rep;
}

// ---------------------------------------------------------------------------
// Measure F

double f_integral(const EvolutionRecord& reference, const EvolutionRecord& probe, double t_max_tau, int stride) {
    if (stride < 1)
        throw std::invalid_argument("f_integral: stride must be >= 1");
    if (reference.size() != probe.size())
        throw std::invalid_argument("f_integral: reference and probe have different sample counts");
    for (std::size_t i = 0; i < reference.size(); ++i)
        if (std::abs(reference.t_over_tau[i] - probe.t_over_tau[i]) > 1e-12)
            throw std::invalid_argument("f_integral: reference and probe time grids differ");
    const double two_pi = 2.0 * std::numbers::pi;
    double sum = 0.0;
    std::size_t prev = 0;
    bool have_prev = false;
    for (std::size_t i = 0; i < reference.size(); i += stride) {
        if (reference.t_over_tau[i] > t_max_tau + 1e-12)
            break;
        if (have_prev) {
            const double d0 = reference.P_e[prev] - probe.P_e[prev];
            const double d1 = reference.P_e[i] - probe.P_e[i];
            const double h = two_pi * (reference.t_over_tau[i] - reference.t_over_tau[prev]);
            sum += 0.5 * h * (d0 * d0 + d1 * d1);
        }
        prev = i;
        have_prev = true;
    }
    return sum;
}

DensityOperator displaced_thermal_initial(cplx alpha, double mbar, const TruncationScheme& trunc) {
    return product_state(kExcited, 0, displaced_thermal(alpha, mbar, trunc.n_mec()), trunc);
}

namespace {

TimeGrid f_grid(const MeasureFOptions& opts) {
    if (opts.n_samples < 600)
        throw std::invalid_argument("measure_f: at least 600 samples are required");
    if (opts.n_angles < 1)
        throw std::invalid_argument("measure_f: n_angles must be >= 1");
    return {0.0, opts.t_max_tau, opts.n_samples};
}

} // namespace

EvolutionRecord f_reference_run(const SystemParams& p, const MeasureFOptions& opts) {
    SystemParams ref = p;
    if (opts.reference == FReference::Undamped) {
        ref.kappa = 0.0;
        ref.Gamma = 0.0;
        ref.gamma = 0.0;
    }
    const TruncationScheme trunc(opts.n_cav, opts.n_mec);
    return evolve_lindblad(ref, displaced_thermal_initial(cplx{}, 0.0, trunc), f_grid(opts), opts.lindblad);
}

MeasureFResult measure_f(double alpha_mag, double mbar, const SystemParams& p, const MeasureFOptions& opts,
                         const EvolutionRecord* reference) {
    if (!(alpha_mag >= 0.0) || !(mbar >= 0.0))
        throw std::invalid_argument("measure_f: |alpha| and mbar must be >= 0");
    const TimeGrid grid = f_grid(opts);
    MeasureFResult out{0.0, {}, 0.0, reference ? *reference : f_reference_run(p, opts)};
    const TruncationScheme trunc(opts.n_cav, opts.n_mec);
    for (int k = 0; k < opts.n_angles; ++k) {
        const cplx alpha = std::polar(alpha_mag, 2.0 * std::numbers::pi * k / opts.n_angles);
        const EvolutionRecord probe = evolve_lindblad(p, displaced_thermal_initial(alpha, mbar, trunc), grid, opts.lindblad);
        const double f = f_integral(out.reference, probe, opts.t_max_tau);
        const double f_coarse = f_integral(out.reference, probe, opts.t_max_tau, 2);
        out.per_angle.push_back(f);
        out.richardson_delta = std::max(out.richardson_delta, std::abs(f - f_coarse));
        out.F += f;
    }
    out.F /= opts.n_angles;
    if (out.richardson_delta >= 1e-3) {
        std::ostringstream msg;
        msg << "measure_f: halving the step moves F by " << out.richardson_delta << " (>= 1e-3)";
        throw ConvergenceError(msg.str(), out.richardson_delta);
    }
    return out;
}

double phonon_number_variance(double alpha_mag, double mbar) {
    return mbar * (mbar + 1.0) + (2.0 * mbar + 1.0) * alpha_mag * alpha_mag;
}

std::vector<std::pair<double, double>> variance_contour(double level, const std::vector<double>& mbar_values) {
    std::vector<std::pair<double, double>> pts;
    for (double m : mbar_values) {
        const double a2 = (level - m * (m + 1.0)) / (2.0 * m + 1.0);
        if (a2 >= 0.0)
            pts.emplace_back(std::sqrt(a2), m);
    }
    return pts;
}

} // namespace hybridsim
