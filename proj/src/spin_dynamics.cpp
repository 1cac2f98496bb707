#include "magsim/spin_dynamics.hpp"

#include "magsim/error.hpp"

#include <algorithm>
#include <complex>
#include <fmt/format.h>

namespace magsim::spin {

void RateParams::validate() const {
    if (!(gamma_e > 0.0) || !std::isfinite(gamma_e))
        throw DomainError(fmt::format("gamma_e must be positive, got {}", gamma_e));
    if (!(r_op >= 0.0) || !std::isfinite(r_op))
        throw DomainError(fmt::format("r_op must be non-negative, got {}", r_op));
    if (!(r_rel >= 0.0) || !std::isfinite(r_rel))
        throw DomainError(fmt::format("r_rel must be non-negative, got {}", r_rel));
}

void FieldConfig::validate() const {
    if (!std::isfinite(bz) || !std::isfinite(by_amp) || !std::isfinite(by_phase))
        throw DomainError("field values must be finite");
    if (!(by_freq >= 0.0) || !std::isfinite(by_freq))
        throw DomainError(fmt::format("by_freq must be non-negative, got {}", by_freq));
}

double SlowingFactorMode::at(double p) const {
    if (kind == Kind::Constant) return q;
    return q_factor(std::clamp(p, 0.0, 1.0));
}

double SlowingFactorMode::upper_bound() const { return kind == Kind::Constant ? q : 6.0; }

double SlowingFactorMode::lower_bound() const { return kind == Kind::Constant ? q : 4.0; }

void SlowingFactorMode::validate() const {
    if (kind == Kind::Constant && !(q > 0.0 && std::isfinite(q)))
        throw DomainError(fmt::format("constant slowing-down factor must be positive, got {}", q));
}

double q_factor(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError(fmt::format("q_factor: polarization {} outside [0, 1]", p));
    const double p2 = p * p;
    return 2.0 * (3.0 + p2) / (1.0 + p2);
}

double steady_state_pz(const RateParams& rates) {
    const double total = rates.r_op + rates.r_rel;
    if (total == 0.0)
        throw DomainError("steady_state_pz: r_op + r_rel is zero");
    return rates.r_op / total;
}

BlochVector bloch_rhs(const BlochVector& p, double t, const RateParams& rates,
                      const FieldConfig& fields, const SlowingFactorMode& q_mode) {
    const BlochVector b{0.0, fields.by(t), fields.bz};
    const BlochVector precession = rates.gamma_e * cross(b, p);
    const BlochVector pumping = rates.r_op * (BlochVector{0.0, 0.0, 1.0} - p);
    const BlochVector relaxation = -rates.r_rel * p;
    const double inv_q = 1.0 / q_mode.at(p.norm());
    return inv_q * (precession + pumping + relaxation);
}

void check_resolution(const RateParams& rates, const FieldConfig& fields,
                      const SlowingFactorMode& q_mode, double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigurationError(fmt::format("dt must be positive, got {}", dt));
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw ConfigurationError(fmt::format("t_end must be positive, got {}", t_end));

    const double b_max = std::hypot(fields.bz, fields.by_amp);
    const double larmor = rates.gamma_e * b_max / q_mode.lower_bound();
    if (larmor > 0.0) {
        const double period = 2.0 * std::numbers::pi / larmor;
        if (period / dt < kMinStepsPerPeriod)
            throw ConfigurationError(fmt::format(
                "dt = {} s gives {:.3g} steps per Larmor period ({} s); need at least {}", dt,
                period / dt, period, kMinStepsPerPeriod));
    }
    if (fields.by_freq > 0.0 && fields.by_amp != 0.0) {
        const double period = 1.0 / fields.by_freq;
        if (period / dt < kMinStepsPerPeriod)
            throw ConfigurationError(fmt::format(
                "dt = {} s gives {:.3g} steps per drive period ({} s); need at least {}", dt,
                period / dt, period, kMinStepsPerPeriod));
    }
}

Trajectory integrate_bloch(const RateParams& rates, const FieldConfig& fields,
                           const SlowingFactorMode& q_mode, const BlochVector& p0,
                           double t_end, double dt) {
    rates.validate();
    fields.validate();
    q_mode.validate();
    check_resolution(rates, fields, q_mode, t_end, dt);

    auto rhs = [&](const BlochVector& p, double t) {
        return bloch_rhs(p, t, rates, fields, q_mode);
    };

    // Number of steps, tolerating t_end being a multiple of dt up to rounding.
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));

    Trajectory out;
    out.reserve(n_steps + 1);
    out.push_back({0.0, p0});

    BlochVector p = p0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double t_next = (k + 1 == n_steps) ? t_end : static_cast<double>(k + 1) * dt;
        const double h = t_next - t;

        const BlochVector k1 = rhs(p, t);
        const BlochVector k2 = rhs(p + (0.5 * h) * k1, t + 0.5 * h);
        const BlochVector k3 = rhs(p + (0.5 * h) * k2, t + 0.5 * h);
        const BlochVector k4 = rhs(p + h * k3, t + h);
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        out.push_back({t_next, p});
    }
    return out;
}

LinearResponseSolution linear_response(const RateParams& rates, const FieldConfig& fields,
                                       const SlowingFactorMode& q_mode) {
    rates.validate();
    fields.validate();
    q_mode.validate();

    LinearResponseSolution sol;
    sol.pz0 = steady_state_pz(rates);

    // Linearize around (0, 0, pz0) with q frozen there:
    //   q dPx/dt = gamma (By pz0 - Bz Py) - G Px
    //   q dPy/dt = gamma Bz Px - G Py
    // and solve for the complex amplitude at the drive frequency.
    const double q = q_mode.at(sol.pz0);
    const double total = rates.r_op + rates.r_rel;
    const double omega = 2.0 * std::numbers::pi * fields.by_freq;
    const double larmor = rates.gamma_e * fields.bz;

    const std::complex<double> s{total, omega * q};
    const std::complex<double> response = rates.gamma_e * s / (s * s + larmor * larmor);

    sol.amp_factor_m = std::abs(response);
    sol.phase_delay = std::arg(response);

    const double drive_rate = rates.gamma_e * std::abs(fields.by_amp);
    if (drive_rate > 0.0 && rates.r_op < 100.0 * drive_rate)
        sol.warning = fmt::format(
            "r_op / (gamma_e By) = {:.3g} < 100; the linear response is only approximate",
            rates.r_op / drive_rate);
    return sol;
}

double transient_time(const RateParams& rates, const SlowingFactorMode& q_mode,
                      double multiplier) {
    const double total = rates.r_op + rates.r_rel;
    if (!(total > 0.0))
        throw ConfigurationError("transient_time: r_op + r_rel must be positive");
    if (!(multiplier >= 0.0))
        throw ConfigurationError("transient_time: multiplier must be non-negative");
    return multiplier * q_mode.upper_bound() / total;
}

SpinTemperatureDistribution spin_temperature_distribution(double pz) {
    if (!(std::abs(pz) < 1.0))
        throw DomainError(fmt::format(
            "spin_temperature_distribution: |pz| = {} must be < 1", std::abs(pz)));

    SpinTemperatureDistribution dist;
    dist.beta_st = std::log((1.0 + pz) / (1.0 - pz));

    // Weights relative to m_F = +2 keep every exponent non-positive for pz > 0.
    const double shift = dist.beta_st >= 0.0 ? 2.0 : -2.0;
    double z = 0.0;
    for (int m = -2; m <= 2; ++m) {
        const double w = std::exp(dist.beta_st * (m - shift));
        dist.occupations[static_cast<std::size_t>(m + 2)] = w;
        z += w;
    }
    for (double& w : dist.occupations) w /= z;
    return dist;
}

} // namespace magsim::spin
