#include "magsim/detection.hpp"

#include "magsim/error.hpp"
#include "magsim/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace magsim::detection {

namespace {

constexpr std::uint64_t stream_id(std::size_t point, unsigned pipeline, std::size_t trial) {
    return (static_cast<std::uint64_t>(point) << 40) ^
           (static_cast<std::uint64_t>(pipeline) << 32) ^ static_cast<std::uint64_t>(trial);
}

// Angle estimate of one trial; no-signal trials report theta = 0.
struct TrialEstimate {
    double theta = 0.0;
    bool no_signal = false;
    bool clamped = false;
};

TrialEstimate conventional_trial(double theta, double n_photons, std::optional<double> i_sat,
                                 Rng& rng) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    CountPair counts = sample_counts({n_photons * c * c, n_photons * s * s}, rng);
    if (i_sat) counts = saturate(counts, *i_sat);
    if (counts.n1 + counts.n2 == 0) return {0.0, true, false};
    return {analyze(counts).theta_est, false, false};
}

TrialEstimate postselected_trial(const mzi::PostselectionOutcome& ps, double beta,
                                 double n_photons, std::optional<double> i_sat, Rng& rng) {
    CountPair counts = sample_counts(expected_counts(n_photons, ps.p_f, ps.theta_tilde), rng);
    if (i_sat) counts = saturate(counts, *i_sat);
    if (counts.n1 + counts.n2 == 0) return {0.0, true, false};
    TrialEstimate est;
    est.theta = invert_postselected_angle(analyze(counts).pv_est, beta, &est.clamped);
    return est;
}

} // namespace

void DetectorConfig::validate() const {
    if (!(n_photons > 0.0) || !std::isfinite(n_photons))
        throw DomainError(fmt::format("n_photons must be positive, got {}", n_photons));
    if (i_sat && !(*i_sat > 0.0))
        throw DomainError(fmt::format("i_sat must be positive, got {}", *i_sat));
}

double daq_ratio(double i_v, double i_h) {
    const double total = i_v + i_h;
    if (total == 0.0) throw NoSignalError("daq_ratio: both detector signals are zero");
    return (i_v - i_h) / total;
}

ExpectedCounts expected_counts(double n_photons, double p_f, double theta_tilde) {
    const double c = std::cos(theta_tilde);
    const double s = std::sin(theta_tilde);
    return {p_f * n_photons * c * c, p_f * n_photons * s * s};
}

CountPair sample_counts(const ExpectedCounts& expected, Rng& rng) {
    CountPair out;
    out.n1 = rng.poisson(expected.n1);
    out.n2 = rng.poisson(expected.n2);
    return out;
}

CountPair sample_counts(const ExpectedCounts& expected, std::uint64_t seed) {
    Rng rng(seed, 0);
    return sample_counts(expected, rng);
}

CountPair saturate(const CountPair& counts, double i_sat) {
    if (!(i_sat > 0.0)) throw DomainError(fmt::format("i_sat must be positive, got {}", i_sat));
    auto clip = [i_sat](std::uint64_t n) {
        return static_cast<double>(n) > i_sat ? static_cast<std::uint64_t>(std::floor(i_sat)) : n;
    };
    return {clip(counts.n1), clip(counts.n2)};
}

DaqResult analyze(const CountPair& counts) {
    DaqResult r;
    const double i_h = static_cast<double>(counts.n1);
    const double i_v = static_cast<double>(counts.n2);
    r.ratio_R = daq_ratio(i_v, i_h);
    r.pv_est = i_v / (i_v + i_h);
    r.theta_est = std::asin(std::sqrt(std::clamp(r.pv_est, 0.0, 1.0)));
    return r;
}

double invert_postselected_angle(double pv, double beta, bool* clamped) {
    bool hit = false;
    if (pv < 0.0 || pv > 1.0) {
        pv = std::clamp(pv, 0.0, 1.0);
        hit = true;
    }
    // With c = cos theta: c^2 + 2 pv cos(beta) c + 2 pv - 1 = 0.
    const double cb = std::cos(beta);
    double disc = pv * pv * cb * cb - 2.0 * pv + 1.0;
    if (disc < 0.0) {
        disc = 0.0;
        hit = true;
    }
    const double one_plus_cb = 2.0 * std::cos(0.5 * beta) * std::cos(0.5 * beta);
    const double denom = 1.0 + pv * cb + std::sqrt(disc);
    // 1 - cos theta, free of cancellation for small theta.
    double one_minus_c = denom > 0.0 ? 2.0 * pv * one_plus_cb / denom : 1.0;
    if (one_minus_c > 1.0) {
        one_minus_c = 1.0; // beyond pi/2
        hit = true;
    }
    if (clamped) *clamped = hit;
    return 2.0 * std::asin(std::sqrt(0.5 * one_minus_c));
}

double shot_noise_delta_theta(double p_f, double n_photons) {
    const double m = p_f * n_photons;
    if (!(m > 0.0)) throw DarkPortError("shot_noise_delta_theta: p_f N is zero");
    return 1.0 / (2.0 * std::sqrt(m));
}

double shot_noise_delta_r(double p_f, double n_photons, double theta_tilde) {
    const double m = p_f * n_photons;
    if (!(m > 0.0)) throw DarkPortError("shot_noise_delta_r: p_f N is zero");
    return std::sin(2.0 * theta_tilde) / std::sqrt(m);
}

SnrComparison snr_compare(double theta, double beta, double n_photons) {
    if (!(theta > 0.0 && theta < 0.05))
        throw DomainError(fmt::format("snr_compare: theta = {} outside (0, 0.05)", theta));
    if (!(n_photons > 0.0)) throw DomainError("snr_compare: n_photons must be positive");

    const auto ps = mzi::postselect(theta, beta);
    SnrComparison out;
    out.p_f = ps.p_f;
    out.theta_tilde = ps.theta_tilde;
    out.snr_psa = ps.theta_tilde / shot_noise_delta_theta(ps.p_f, n_photons);
    out.snr_conventional = theta * std::sqrt(n_photons);
    return out;
}

DaqStatistics daq_monte_carlo(double n_photons, double p_f, double theta_tilde,
                              std::size_t trials, std::uint64_t seed,
                              std::optional<double> i_sat) {
    if (trials < 2) throw DomainError("daq_monte_carlo: need at least two trials");
    const ExpectedCounts expected = expected_counts(n_photons, p_f, theta_tilde);

    std::vector<double> r(trials), angle(trials);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(trials); ++k) {
        Rng rng(seed, static_cast<std::uint64_t>(k));
        CountPair counts = sample_counts(expected, rng);
        if (i_sat) counts = saturate(counts, *i_sat);
        const auto idx = static_cast<std::size_t>(k);
        if (counts.n1 + counts.n2 == 0) {
            r[idx] = 0.0;
            angle[idx] = 0.0;
            continue;
        }
        const DaqResult res = analyze(counts);
        r[idx] = res.ratio_R;
        angle[idx] = res.theta_est;
    }

    auto mean_std = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair{mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
    };
    DaqStatistics out;
    out.trials = trials;
    std::tie(out.mean_r, out.std_r) = mean_std(r);
    std::tie(out.mean_theta_tilde, out.std_theta_tilde) = mean_std(angle);
    return out;
}

std::vector<SaturationRow> saturation_study(double theta, double beta,
                                            std::span<const double> n_grid,
                                            std::optional<double> i_sat, std::size_t trials,
                                            std::uint64_t seed) {
    if (trials < 100)
        throw DomainError(fmt::format("saturation_study: trials = {} < 100", trials));
    if (i_sat && !(*i_sat > 0.0)) throw DomainError("saturation_study: i_sat must be positive");
    for (double n : n_grid)
        if (!(n > 0.0)) throw DomainError("saturation_study: photon numbers must be positive");

    const auto ps = mzi::postselect(theta, beta);

    std::vector<SaturationRow> rows;
    rows.reserve(n_grid.size());
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
        const double n = n_grid[j];
        std::vector<TrialEstimate> conv(trials), post(trials);

#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(trials); ++k) {
            const auto idx = static_cast<std::size_t>(k);
            Rng rng_conv(seed, stream_id(j, 0, idx));
            Rng rng_psa(seed, stream_id(j, 1, idx));
            conv[idx] = conventional_trial(theta, n, i_sat, rng_conv);
            post[idx] = postselected_trial(ps, beta, n, i_sat, rng_psa);
        }

        SaturationRow row;
        row.n_photons = n;
        row.p_f = ps.p_f;
        row.theta_true = theta;
        row.trials = trials;
        row.seed = seed;
        double ss_conv = 0.0, ss_psa = 0.0;
        for (std::size_t k = 0; k < trials; ++k) {
            ss_conv += (conv[k].theta - theta) * (conv[k].theta - theta);
            ss_psa += (post[k].theta - theta) * (post[k].theta - theta);
            row.no_signal_conv += conv[k].no_signal ? 1 : 0;
            row.no_signal_psa += post[k].no_signal ? 1 : 0;
            row.clamped_psa += post[k].clamped ? 1 : 0;
        }
        row.rms_err_conv = std::sqrt(ss_conv / static_cast<double>(trials));
        row.rms_err_psa = std::sqrt(ss_psa / static_cast<double>(trials));
        rows.push_back(row);
    }
    return rows;
}

} // namespace magsim::detection
