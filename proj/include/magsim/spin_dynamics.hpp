#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace magsim::spin {

/// Electron-spin polarization vector P = 2<S> (dimensionless).
struct BlochVector {
    double px = 0.0;
    double py = 0.0;
    double pz = 0.0;

    double norm() const { return std::sqrt(px * px + py * py + pz * pz); }

    BlochVector& operator+=(const BlochVector& o) {
        px += o.px;
        py += o.py;
        pz += o.pz;
        return *this;
    }
    friend BlochVector operator+(BlochVector a, const BlochVector& b) { return a += b; }
    friend BlochVector operator-(const BlochVector& a, const BlochVector& b) {
        return {a.px - b.px, a.py - b.py, a.pz - b.pz};
    }
    friend BlochVector operator*(double s, const BlochVector& v) {
        return {s * v.px, s * v.py, s * v.pz};
    }
    friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

inline BlochVector cross(const BlochVector& a, const BlochVector& b) {
    return {a.py * b.pz - a.pz * b.py, a.pz * b.px - a.px * b.pz, a.px * b.py - a.py * b.px};
}

/// Gyromagnetic ratio in rad s^-1 nT^-1, rates in s^-1.
struct RateParams {
    double gamma_e = 2.0 * std::numbers::pi * 28.0;
    double r_op = 0.0;
    double r_rel = 0.0;

    // Checks gamma_e > 0 and non-negative rates. A vanishing total rate is
    // legal for integration but not for the steady state.
    void validate() const;
};

/// Bias field B_z and transverse drive B_y(t) = by_amp cos(2 pi by_freq t + by_phase); fields in nT.
struct FieldConfig {
    double bz = 0.0;
    double by_amp = 0.0;
    double by_freq = 0.0;
    double by_phase = 0.0;

    double by(double t) const {
        return by_amp * std::cos(2.0 * std::numbers::pi * by_freq * t + by_phase);
    }
    void validate() const;
};

/// Nuclear slowing-down factor: either a fixed q or q(P) = 2(3+P^2)/(1+P^2).
struct SlowingFactorMode {
    enum class Kind { Constant, PolarizationDependent };

    Kind kind = Kind::PolarizationDependent;
    double q = 4.0; // used only when kind == Constant

    static SlowingFactorMode constant(double q) { return {Kind::Constant, q}; }
    static SlowingFactorMode polarization_dependent() { return {Kind::PolarizationDependent, 4.0}; }

    /// q at polarization magnitude p; p is clamped into [0, 1].
    double at(double p) const;
    /// Largest q the mode can produce (6 for the polarization-dependent law).
    double upper_bound() const;
    /// Smallest q the mode can produce (4 for the polarization-dependent law).
    double lower_bound() const;
    void validate() const;
};

/// Ground-state F=2 sublevel occupations in a spin-temperature equilibrium.
struct SpinTemperatureDistribution {
    std::array<double, 5> occupations{}; // m_F = -2 .. +2
    double beta_st = 0.0;

    double occupation(int m_f) const { return occupations.at(static_cast<std::size_t>(m_f + 2)); }
};

struct LinearResponseSolution {
    double pz0 = 0.0;
    double amp_factor_m = 0.0; // nT^-1
    double phase_delay = 0.0;  // rad, P_x = M pz0 By cos(2 pi nu t + by_phase + phase_delay)
    std::string warning;       // non-empty when R_op is not >> gamma_e By

    double px_amplitude(double by_amp) const { return amp_factor_m * pz0 * std::abs(by_amp); }
};

struct TrajectorySample {
    double t = 0.0;
    BlochVector p;
};

using Trajectory = std::vector<TrajectorySample>;

/// Minimum RK4 steps per Larmor or drive period accepted by integrate_bloch.
inline constexpr double kMinStepsPerPeriod = 50.0;

double q_factor(double p);

double steady_state_pz(const RateParams& rates);

BlochVector bloch_rhs(const BlochVector& p, double t, const RateParams& rates,
                      const FieldConfig& fields, const SlowingFactorMode& q_mode);

/// Throws ConfigurationError when dt does not resolve the Larmor and drive
/// periods with at least kMinStepsPerPeriod steps, or dt/t_end are not positive.
void check_resolution(const RateParams& rates, const FieldConfig& fields,
                      const SlowingFactorMode& q_mode, double t_end, double dt);

/// Fixed-step classical RK4 from t = 0 to t_end. Sample k sits at t = k dt;
/// the last step is shortened so that t_end itself is always included.
Trajectory integrate_bloch(const RateParams& rates, const FieldConfig& fields,
                           const SlowingFactorMode& q_mode, const BlochVector& p0,
                           double t_end, double dt);

LinearResponseSolution linear_response(const RateParams& rates, const FieldConfig& fields,
                                       const SlowingFactorMode& q_mode);

/// Time after which the pumping transient has decayed by e^-multiplier,
/// using the slowest relaxation the q mode allows.
double transient_time(const RateParams& rates, const SlowingFactorMode& q_mode,
                      double multiplier = 5.0);

SpinTemperatureDistribution spin_temperature_distribution(double pz);

} // namespace magsim::spin
