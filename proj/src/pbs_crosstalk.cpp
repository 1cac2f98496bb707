#include "magsim/pbs_crosstalk.hpp"

#include "magsim/error.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace magsim::pbs {

namespace {

void require_positive_v0(double v0, const char* where) {
    if (!(v0 > 0.0) || !std::isfinite(v0))
        throw DomainError(fmt::format("{}: v0 must be positive and finite, got {}", where, v0));
}

} // namespace

void PbsParams::validate() const {
    auto in_range = [](double v, double lo, double hi, bool lo_open, bool hi_open, const char* n) {
        const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
        if (!ok) throw DomainError(fmt::format("{} = {} out of range", n, v));
    };
    in_range(t_h, 0.0, 1.0, true, false, "t_h");
    in_range(r_v, 0.0, 1.0, true, false, "r_v");
    in_range(delta1, 0.0, 1.0, false, true, "delta1");
    in_range(delta2, 0.0, 1.0, false, true, "delta2");
    if (!(eta_t > 0.0) || !std::isfinite(eta_t))
        throw DomainError(fmt::format("eta_t must be positive, got {}", eta_t));
    if (!(eta_r > 0.0) || !std::isfinite(eta_r))
        throw DomainError(fmt::format("eta_r must be positive, got {}", eta_r));
    // Small slack so that t_h = 1 - delta1 written in decimal passes.
    constexpr double slack = 1e-12;
    if (t_h + delta1 > 1.0 + slack)
        throw DomainError(fmt::format("t_h + delta1 = {} exceeds 1", t_h + delta1));
    if (r_v + delta2 > 1.0 + slack)
        throw DomainError(fmt::format("r_v + delta2 = {} exceeds 1", r_v + delta2));
}

double measured_ratio(double v0, const PbsParams& pbs) {
    require_positive_v0(v0, "measured_ratio");
    const double transmitted = pbs.t_h + v0 * pbs.delta2;
    if (transmitted == 0.0) throw DomainError("measured_ratio: no light in the transmitted port");
    return pbs.eta_r * (pbs.delta1 + v0 * pbs.r_v) / (pbs.eta_t * transmitted);
}

double calibration_ratio(const PbsParams& pbs) {
    return pbs.eta_r * (pbs.delta1 + pbs.r_v) / (pbs.eta_t * (pbs.t_h + pbs.delta2));
}

double calibrated_ratio(double v0, const PbsParams& pbs) {
    require_positive_v0(v0, "calibrated_ratio");
    // Converter coefficients cancel; evaluate the reduced form directly so the
    // cancellation is exact rather than up to rounding.
    return ((pbs.delta1 + v0 * pbs.r_v) / (pbs.t_h + v0 * pbs.delta2)) *
           ((pbs.t_h + pbs.delta2) / (pbs.delta1 + pbs.r_v));
}

double error_ratio(double v0, const PbsParams& pbs) {
    return std::abs(calibrated_ratio(v0, pbs) - v0) / v0;
}

PolarizationRatio v0_from_angle(double angle) {
    if (!(angle > 0.0 && angle < 0.5 * std::numbers::pi))
        throw DomainError(fmt::format("v0_from_angle: angle {} outside (0, pi/2)", angle));
    const double t = std::tan(angle);
    return {t * t};
}

} // namespace magsim::pbs
