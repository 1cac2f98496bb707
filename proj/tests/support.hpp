#pragma once

// Test-only oracles and helpers. Nothing here calls into the code paths it
// is used to check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

namespace magsim::testing {

inline std::string preset(const std::string& name) {
    return std::string(MAGSIM_PRESET_DIR) + "/" + name + ".toml";
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

/// One-sided amplitude spectrum |X_k| * 2 / N of a real series (k = 0 .. N/2).
inline std::vector<double> amplitude_spectrum(std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> in(x.begin(), x.end());
    std::vector<fftw_complex> out(static_cast<std::size_t>(n / 2 + 1));
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<double> amp(out.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        amp[k] = 2.0 * std::hypot(out[k][0], out[k][1]) / n;
    amp[0] *= 0.5;
    return amp;
}

/// Complex Fourier coefficient at one frequency by direct summation:
/// x(t) ~ Re(c e^{i w t}) gives back c when the window spans whole periods.
inline std::complex<double> single_bin(std::span<const double> t, std::span<const double> x,
                                       double freq_hz) {
    std::complex<double> acc{};
    const double w = 2.0 * std::numbers::pi * freq_hz;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * std::polar(1.0, -w * t[i]);
    return 2.0 * acc / static_cast<double>(x.size());
}

/// Uniform (theta, beta) pairs over [0, pi] x [0, 2 pi) from a fixed seed.
inline std::vector<std::pair<double, double>> random_angles(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> th(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> be(0.0, 2.0 * std::numbers::pi);
    std::vector<std::pair<double, double>> out(n);
    for (auto& p : out) p = {th(gen), be(gen)};
    return out;
}

} // namespace magsim::testing
