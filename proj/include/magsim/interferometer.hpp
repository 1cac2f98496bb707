#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace magsim::mzi {

using cplx = std::complex<double>;

enum class Path { One = 0, Two = 1 };
enum class Pol { H = 0, V = 1 };

/// Probe photon state over {path 1, 2} x {H, V}.
/// Amplitudes are stored in the order (1H, 1V, 2H, 2V).
struct PathPolarizationState {
    std::array<cplx, 4> amplitudes{};

    cplx& at(Path path, Pol pol) {
        return amplitudes[2 * static_cast<std::size_t>(path) + static_cast<std::size_t>(pol)];
    }
    const cplx& at(Path path, Pol pol) const {
        return amplitudes[2 * static_cast<std::size_t>(path) + static_cast<std::size_t>(pol)];
    }
    double norm_squared() const;
};

/// Polarization-only state (H, V).
struct PolarizationState {
    cplx h{};
    cplx v{};

    double norm_squared() const { return std::norm(h) + std::norm(v); }
};

/// Phase beta of the postselected port |f> = (|1> + e^{i beta}|2>)/sqrt(2).
struct MziConfig {
    double beta = 0.0;
    void validate() const; // beta in [0, 2 pi)
};

struct PostselectionOutcome {
    double p_f = 0.0;
    PolarizationState pol_state;
    double pv_tilde = 0.0;
    double theta_tilde = 0.0;  // principal branch, [0, pi/2]
    std::optional<double> eta; // theta_tilde / theta, absent at theta == 0
};

/// Postselection probabilities at or below this floor are rejected.
inline constexpr double kDarkPortFloor = 1e-15;

/// e^{-i theta A sigma_x} (|1> + |2>)|H>/sqrt(2) with A = |1><1|.
PathPolarizationState entangled_state(double theta);

/// e^{-i theta sigma_x}|H>, the probe state without the interferometer.
PolarizationState conventional_state(double theta);

/// Unnormalized polarization state <f|psi>.
PolarizationState project_onto_port(const PathPolarizationState& psi, double beta);

/// p_f = (1 + cos(theta) cos(beta)) / 2.
double postselection_probability(double theta, double beta);

PostselectionOutcome postselect(double theta, double beta, double p_min = kDarkPortFloor);

/// sin^2(theta) / (4 p_f), the V-population after postselection.
double pv_tilde(double theta, double beta, double p_min = kDarkPortFloor);

/// QFI of the normalized postselected polarization state.
double qfi_postselected(double theta, double beta, double p_min = kDarkPortFloor);

double qfi_entangled(double theta);
double qfi_conventional(double theta);

/// theta -> normalized pure state, as a flat list of complex amplitudes.
using StateFamily = std::function<std::vector<cplx>(double)>;

/// Pure-state QFI 4(<d psi|d psi> - |<psi|d psi>|^2) from central differences.
/// Second-order accurate in h; intended as a cross-check of closed forms.
double qfi_numeric(const StateFamily& family, double theta, double h);

struct AmplificationPoint {
    double theta = 0.0;
    std::optional<double> theta_tilde; // empty at the dark port
};

std::vector<AmplificationPoint> amplification_curve(std::span<const double> theta_grid,
                                                    double beta, double p_min = kDarkPortFloor);

} // namespace magsim::mzi
