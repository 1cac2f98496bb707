#pragma once

namespace magsim::pbs {

/// Imperfect polarizing beam splitter and its two photodetectors.
///
/// H light is transmitted with t_h and leaks into the reflected port with
/// delta1; V light is reflected with r_v and leaks into the transmitted port
/// with delta2. eta_t and eta_r are the photo-electric conversion
/// coefficients of the transmitted and reflected detectors.
struct PbsParams {
    double t_h = 1.0;
    double r_v = 1.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double eta_t = 1.0;
    double eta_r = 1.0;

    /// Energy-conserving splitter with t_h = 1 - delta1 and r_v = 1 - delta2.
    static PbsParams lossless(double delta1, double delta2, double eta_t = 1.0, double eta_r = 1.0) {
        return {1.0 - delta1, 1.0 - delta2, delta1, delta2, eta_t, eta_r};
    }

    void validate() const;
};

/// True intensity ratio V0 = I_V / I_H of the light entering the splitter.
struct PolarizationRatio {
    double v0 = 1.0;
};

double measured_ratio(double v0, const PbsParams& pbs);

/// Natural-light (equal H and V) calibration ratio.
double calibration_ratio(const PbsParams& pbs);

/// measured_ratio / calibration_ratio; independent of eta_t and eta_r.
double calibrated_ratio(double v0, const PbsParams& pbs);

/// |calibrated_ratio - v0| / v0.
double error_ratio(double v0, const PbsParams& pbs);

/// tan^2(angle) for a linear polarization rotated by angle from H.
PolarizationRatio v0_from_angle(double angle);

} // namespace magsim::pbs
