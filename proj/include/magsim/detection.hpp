#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "magsim/rng.hpp"

namespace magsim::detection {

struct DetectorConfig {
    double n_photons = 1e6;
    std::optional<double> i_sat; // per-detector saturation count; empty = unlimited
    std::uint64_t seed = 0;

    void validate() const;
};

/// Mean photon numbers at the H (transmitted) and V (reflected) detectors.
struct ExpectedCounts {
    double n1 = 0.0;
    double n2 = 0.0;

    double total() const { return n1 + n2; }
};

/// Integer photon counts at the H and V detectors.
struct CountPair {
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;

    friend bool operator==(const CountPair&, const CountPair&) = default;
};

struct DaqResult {
    double ratio_R = 0.0; // (I_V - I_H) / (I_V + I_H)
    double pv_est = 0.0;  // (R + 1) / 2
    double theta_est = 0.0;
};

double daq_ratio(double i_v, double i_h);

ExpectedCounts expected_counts(double n_photons, double p_f, double theta_tilde);

CountPair sample_counts(const ExpectedCounts& expected, Rng& rng);
CountPair sample_counts(const ExpectedCounts& expected, std::uint64_t seed);

/// Hard clip of each channel at i_sat.
CountPair saturate(const CountPair& counts, double i_sat);

/// R, the V-population estimate and the principal-branch angle asin(sqrt(pv)).
DaqResult analyze(const CountPair& counts);

/// Invert sin^2(theta) = 4 p_f(theta, beta) pv for theta on [0, pi/2].
/// Sets *clamped when pv lies outside the range reachable at this beta.
double invert_postselected_angle(double pv, double beta, bool* clamped = nullptr);

/// delta theta~ = 1 / (2 sqrt(p_f N)).
double shot_noise_delta_theta(double p_f, double n_photons);

/// delta R = sin(2 theta~) / sqrt(p_f N).
double shot_noise_delta_r(double p_f, double n_photons, double theta_tilde);

struct SnrComparison {
    double p_f = 0.0;
    double theta_tilde = 0.0;
    double snr_psa = 0.0;
    double snr_conventional = 0.0;

    double ratio() const { return snr_psa / snr_conventional; }
};

/// Small-angle SNR comparison. The PSA side uses the exact amplified angle
/// and the shot-noise limit 1/(2 sqrt(p_f N)); the conventional reference
/// uses delta theta = 1/sqrt(N). Requires 0 < theta < 0.05.
SnrComparison snr_compare(double theta, double beta, double n_photons);

struct DaqStatistics {
    double mean_r = 0.0;
    double std_r = 0.0;
    double mean_theta_tilde = 0.0;
    double std_theta_tilde = 0.0;
    std::size_t trials = 0;
};

/// Repeated Poisson realizations of the postselected detector pair.
DaqStatistics daq_monte_carlo(double n_photons, double p_f, double theta_tilde,
                              std::size_t trials, std::uint64_t seed,
                              std::optional<double> i_sat = std::nullopt);

struct SaturationRow {
    double n_photons = 0.0;
    double p_f = 0.0;
    double theta_true = 0.0;
    double rms_err_psa = 0.0;
    double rms_err_conv = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t clamped_psa = 0;   // estimates pushed back into the reachable range
    std::size_t no_signal_psa = 0; // trials with both channels empty
    std::size_t no_signal_conv = 0;
};

/// RMS angle error of the conventional and postselected pipelines under
/// Poisson noise and (optionally) hard detector saturation. Trial k of grid
/// point j draws from a substream fixed by (seed, j, pipeline, k).
std::vector<SaturationRow> saturation_study(double theta, double beta,
                                            std::span<const double> n_grid,
                                            std::optional<double> i_sat, std::size_t trials,
                                            std::uint64_t seed);

} // namespace magsim::detection
