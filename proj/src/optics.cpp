#include "magsim/optics.hpp"

#include "magsim/error.hpp"

#include <cmath>
#include <fmt/format.h>

namespace magsim::optics {

void OpticalParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(fmt::format("{} must be positive, got {}", name, v));
    };
    positive(path_length_m, "path_length_m");
    positive(electron_radius_m, "electron_radius_m");
    positive(speed_of_light_m_s, "speed_of_light_m_s");
    positive(atom_density_m3, "atom_density");
    positive(probe_freq_hz, "probe_freq_hz");
    positive(resonance_freq_hz, "resonance_freq_hz");
    positive(fwhm_hz, "fwhm_hz");
    if (!(oscillator_strength > 0.0 && oscillator_strength <= 1.0))
        throw DomainError(
            fmt::format("oscillator_strength must lie in (0, 1], got {}", oscillator_strength));
}

double lorentzian_d(double nu, double nu0, double delta_nu) {
    const double detuning = nu - nu0;
    const double half_width = 0.5 * delta_nu;
    const double denom = detuning * detuning + half_width * half_width;
    if (denom == 0.0)
        throw DomainError("lorentzian_d: zero detuning with zero linewidth");
    return detuning / denom;
}

double faraday_angle(double px, const OpticalParams& params) {
    if (!(std::abs(px) <= 1.0))
        throw DomainError(fmt::format("faraday_angle: |px| = {} exceeds 1", std::abs(px)));
    const double d = lorentzian_d(params.probe_freq_hz, params.resonance_freq_hz, params.fwhm_hz);
    const double scale = 0.25 * params.path_length_m * params.electron_radius_m *
                         params.speed_of_light_m_s * params.oscillator_strength *
                         params.atom_density_m3 * d;
    return scale * px;
}

FaradaySeries faraday_series(std::span<const TimedValue> px_series, const OpticalParams& params) {
    if (px_series.empty())
        throw DomainError("faraday_series: empty input series");

    FaradaySeries out;
    out.reserve(px_series.size());
    for (std::size_t i = 0; i < px_series.size(); ++i) {
        if (i > 0 && !(px_series[i].t > px_series[i - 1].t))
            throw DomainError(fmt::format("faraday_series: time not increasing at index {}", i));
        try {
            out.push_back({px_series[i].t, faraday_angle(px_series[i].value, params)});
        } catch (const DomainError& e) {
            throw DomainError(fmt::format("faraday_series: index {}: {}", i, e.what()));
        }
    }
    return out;
}

FaradaySeries faraday_series(std::span<const spin::TrajectorySample> trajectory,
                             const OpticalParams& params) {
    std::vector<TimedValue> px;
    px.reserve(trajectory.size());
    for (const auto& s : trajectory) px.push_back({s.t, s.p.px});
    return faraday_series(std::span<const TimedValue>(px), params);
}

} // namespace magsim::optics
