#include "magsim/interferometer.hpp"

#include "magsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace magsim::mzi {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr cplx kI{0.0, 1.0};

// Unnormalized H amplitude (e^{-i beta} + cos theta), with the real part in
// product form so it keeps full relative precision near the dark port.
cplx h_amplitude(double theta, double beta) {
    const double re = 2.0 * std::cos(0.5 * (beta + theta)) * std::cos(0.5 * (beta - theta));
    return {re, -std::sin(beta)};
}

void require_bright(double p_f, double p_min, const char* where, double theta, double beta) {
    if (!(p_f > p_min))
        throw DarkPortError(fmt::format("{}: p_f = {:.3e} <= {:.1e} at theta = {}, beta = {}",
                                        where, p_f, p_min, theta, beta));
}

} // namespace

double PathPolarizationState::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
}

void MziConfig::validate() const {
    if (!(beta >= 0.0 && beta < 2.0 * std::numbers::pi))
        throw DomainError(fmt::format("beta = {} outside [0, 2 pi)", beta));
}

PathPolarizationState entangled_state(double theta) {
    PathPolarizationState psi;
    psi.at(Path::One, Pol::H) = kInvSqrt2 * std::cos(theta);
    psi.at(Path::One, Pol::V) = -kI * (kInvSqrt2 * std::sin(theta));
    psi.at(Path::Two, Pol::H) = kInvSqrt2;
    psi.at(Path::Two, Pol::V) = 0.0;
    return psi;
}

PolarizationState conventional_state(double theta) {
    return {std::cos(theta), -kI * std::sin(theta)};
}

PolarizationState project_onto_port(const PathPolarizationState& psi, double beta) {
    // <f| = (<1| + e^{-i beta} <2|) / sqrt(2)
    const cplx w2 = std::polar(kInvSqrt2, -beta);
    return {kInvSqrt2 * psi.at(Path::One, Pol::H) + w2 * psi.at(Path::Two, Pol::H),
            kInvSqrt2 * psi.at(Path::One, Pol::V) + w2 * psi.at(Path::Two, Pol::V)};
}

double postselection_probability(double theta, double beta) {
    // (1 + cos theta cos beta)/2 written as a sum of squares.
    const double a = std::cos(0.5 * (theta + beta));
    const double b = std::cos(0.5 * (theta - beta));
    return 0.5 * (a * a + b * b);
}

PostselectionOutcome postselect(double theta, double beta, double p_min) {
    MziConfig{beta}.validate();
    const cplx h = h_amplitude(theta, beta);
    const double s = std::sin(theta);
    const double four_pf = std::norm(h) + s * s;

    PostselectionOutcome out;
    out.p_f = 0.25 * four_pf;
    require_bright(out.p_f, p_min, "postselect", theta, beta);

    const double scale = 1.0 / std::sqrt(four_pf);
    out.pol_state = {scale * h, -kI * (scale * s)};
    out.pv_tilde = std::clamp(s * s / four_pf, 0.0, 1.0);
    out.theta_tilde = std::asin(std::sqrt(out.pv_tilde));
    if (theta != 0.0) out.eta = out.theta_tilde / theta;
    return out;
}

double pv_tilde(double theta, double beta, double p_min) {
    const double p_f = postselection_probability(theta, beta);
    require_bright(p_f, p_min, "pv_tilde", theta, beta);
    const double s = std::sin(theta);
    return std::clamp(s * s / (4.0 * p_f), 0.0, 1.0);
}

double qfi_postselected(double theta, double beta, double p_min) {
    const double p_f = postselection_probability(theta, beta);
    require_bright(p_f, p_min, "qfi_postselected", theta, beta);
    // 4 p_f - sin^2 theta = |e^{-i beta} + cos theta|^2, which is manifestly >= 0.
    const double numerator = std::norm(h_amplitude(theta, beta));
    return numerator / (4.0 * p_f * p_f);
}

double qfi_entangled(double /*theta*/) { return 2.0; }

double qfi_conventional(double /*theta*/) { return 4.0; }

double qfi_numeric(const StateFamily& family, double theta, double h) {
    if (!(h > 0.0)) throw DomainError("qfi_numeric: step must be positive");

    const auto psi = family(theta);
    const auto plus = family(theta + h);
    const auto minus = family(theta - h);
    if (plus.size() != psi.size() || minus.size() != psi.size())
        throw DomainError("qfi_numeric: state dimension changes with theta");

    double dd = 0.0;
    cplx overlap{};
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const cplx d = (plus[i] - minus[i]) / (2.0 * h);
        dd += std::norm(d);
        overlap += std::conj(psi[i]) * d;
    }
    return 4.0 * (dd - std::norm(overlap));
}

std::vector<AmplificationPoint> amplification_curve(std::span<const double> theta_grid,
                                                    double beta, double p_min) {
    std::vector<AmplificationPoint> out;
    out.reserve(theta_grid.size());
    for (double theta : theta_grid) {
        AmplificationPoint pt{theta, std::nullopt};
        try {
            pt.theta_tilde = postselect(theta, beta, p_min).theta_tilde;
        } catch (const DarkPortError&) {
        }
        out.push_back(pt);
    }
    return out;
}

} // namespace magsim::mzi
