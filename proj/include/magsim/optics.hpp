#pragma once

#include <span>
#include <vector>

#include "magsim/spin_dynamics.hpp"

namespace magsim::optics {

/// Probe and vapor parameters of the Faraday-rotation signal (SI units).
struct OpticalParams {
    double path_length_m = 0.01;
    double electron_radius_m = 2.8e-15;
    double speed_of_light_m_s = 2.998e8;
    double oscillator_strength = 2.0 / 3.0;
    double atom_density_m3 = 1e20;
    double probe_freq_hz = 0.0;
    double resonance_freq_hz = 0.0;
    double fwhm_hz = 0.0;

    /// Positive lengths, frequencies and density; oscillator strength in (0, 1].
    void validate() const;

    /// Config files state the density in cm^-3.
    static constexpr double density_from_per_cm3(double n_cm3) { return n_cm3 * 1e6; }
};

struct TimedValue {
    double t = 0.0;
    double value = 0.0;
};

struct FaradaySample {
    double t = 0.0;
    double theta = 0.0;
};

using FaradaySeries = std::vector<FaradaySample>;

/// Dispersive Lorentzian (nu - nu0) / ((nu - nu0)^2 + (fwhm/2)^2), in Hz^-1.
double lorentzian_d(double nu, double nu0, double delta_nu);

/// theta = l r_e c f n D(nu) px / 4, in rad.
double faraday_angle(double px, const OpticalParams& params);

FaradaySeries faraday_series(std::span<const TimedValue> px_series, const OpticalParams& params);
FaradaySeries faraday_series(std::span<const spin::TrajectorySample> trajectory,
                             const OpticalParams& params);

} // namespace magsim::optics
