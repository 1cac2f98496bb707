#include "magsim/experiments.hpp"

#include "magsim/detection.hpp"
#include "magsim/error.hpp"
#include "magsim/interferometer.hpp"
#include "magsim/optics.hpp"
#include "magsim/pbs_crosstalk.hpp"
#include "magsim/spin_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace magsim {

namespace {

using nlohmann::json;

std::vector<double> sorted_betas(const RunConfig& cfg) {
    auto b = cfg.mzi->betas;
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

const SweepAxis& axis(const RunConfig& cfg, const std::string& name) { return cfg.sweeps.at(name); }

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"fig2a", "fig2b", "fig3", "fig6", "snr", "saturation"};
    return names;
}

void require_sections(const std::string& command, const RunConfig& cfg) {
    auto need = [&](bool present, const std::string& what) {
        if (!present)
            throw ValidationError(fmt::format("command {} requires {}", command, what));
    };
    auto need_axis = [&](const std::string& name) {
        need(cfg.sweeps.count(name) > 0, fmt::format("[sweep.{}]", name));
    };

    if (command == "fig2a" || command == "fig2b") {
        need(cfg.mzi.has_value(), "[mzi]");
        need_axis("theta");
    } else if (command == "fig3") {
        need(cfg.spin.has_value(), "[spin]");
        need(cfg.optics.has_value(), "[optics]");
        need(cfg.mzi.has_value(), "[mzi]");
    } else if (command == "fig6") {
        need(!cfg.splitters.empty(), "[pbs]");
        need_axis("v0");
        if (!(axis(cfg, "v0").min > 0.0))
            throw ValidationError("[sweep.v0] must be strictly positive");
    } else if (command == "snr") {
        need(cfg.mzi.has_value(), "[mzi]");
        need(cfg.detector.has_value(), "[detector]");
        need_axis("theta");
        const auto& th = axis(cfg, "theta");
        if (!(th.min > 0.0 && th.max < 0.05))
            throw ValidationError("[sweep.theta] for snr must lie inside (0, 0.05)");
    } else if (command == "saturation") {
        need(cfg.detector.has_value(), "[detector]");
        need(cfg.study.has_value(), "[study]");
        need_axis("n_photons");
        if (!(axis(cfg, "n_photons").min > 0.0))
            throw ValidationError("[sweep.n_photons] must be strictly positive");
    } else {
        throw ValidationError(fmt::format("unknown command '{}'", command));
    }
}

ExperimentResult run_fig2a(const RunConfig& cfg) {
    require_sections("fig2a", cfg);
    Table t{"fig2a", {"theta_rad", "beta_rad", "qfi_ps", "qfi_ref", "status"}, {}};
    const auto thetas = axis(cfg, "theta").values();
    ExperimentResult res;
    std::size_t rejected = 0;
    for (double beta : sorted_betas(cfg)) {
        for (double theta : thetas) {
            const double ref = mzi::qfi_entangled(theta);
            try {
                const double q = mzi::qfi_postselected(theta, beta, cfg.mzi->p_min);
                t.add_row({theta, beta, q, ref, std::string("ok")});
            } catch (const DarkPortError&) {
                t.add_row({theta, beta, Empty{}, ref, std::string("dark_port")});
                ++rejected;
            }
        }
    }
    res.summary["rows"] = t.rows.size();
    res.summary["dark_port_rows"] = rejected;
    res.tables.push_back(std::move(t));
    return res;
}

ExperimentResult run_fig2b(const RunConfig& cfg) {
    require_sections("fig2b", cfg);
    Table t{"fig2b",
            {"theta_rad", "beta_rad", "p_f", "pv_tilde", "theta_tilde_rad", "eta", "qfi_ps",
             "theta_diag_rad", "status"},
            {}};
    const auto thetas = axis(cfg, "theta").values();
    ExperimentResult res;
    json slopes = json::object();
    for (double beta : sorted_betas(cfg)) {
        for (double theta : thetas) {
            const double pf = mzi::postselection_probability(theta, beta);
            try {
                const auto ps = mzi::postselect(theta, beta, cfg.mzi->p_min);
                Cell eta = ps.eta ? Cell{*ps.eta} : Cell{Empty{}};
                t.add_row({theta, beta, ps.p_f, ps.pv_tilde, ps.theta_tilde, eta,
                           mzi::qfi_postselected(theta, beta, cfg.mzi->p_min), theta,
                           std::string("ok")});
            } catch (const DarkPortError&) {
                t.add_row({theta, beta, pf, Empty{}, Empty{}, Empty{}, Empty{}, theta,
                           std::string("dark_port")});
            }
        }
        const double pf0 = mzi::postselection_probability(0.0, beta);
        if (pf0 > 0.0) slopes[format_double(beta)] = 1.0 / (2.0 * std::sqrt(pf0));
    }
    res.summary["small_angle_slope_by_beta"] = slopes;
    res.tables.push_back(std::move(t));
    return res;
}

ExperimentResult run_fig3(const RunConfig& cfg) {
    require_sections("fig3", cfg);
    const SpinSection& sp = *cfg.spin;
    const auto& opt = *cfg.optics;
    ExperimentResult res;

    const auto lr = spin::linear_response(sp.rates, sp.fields, sp.q_mode);
    if (!lr.warning.empty()) res.warnings.push_back(lr.warning);

    const auto traj = spin::integrate_bloch(sp.rates, sp.fields, sp.q_mode, sp.p0, sp.t_end, sp.dt);
    const double t0 = spin::transient_time(sp.rates, sp.q_mode, sp.transient_multiplier);
    std::size_t k0 = 0;
    while (k0 < traj.size() && traj[k0].t < t0) ++k0;

    std::vector<spin::TrajectorySample> window;
    for (std::size_t k = k0; k < traj.size(); k += sp.output_stride) window.push_back(traj[k]);
    if (window.empty()) throw ConfigurationError("fig3: no samples after the transient");

    const auto theta_series = optics::faraday_series(std::span<const spin::TrajectorySample>(window), opt);

    Table traj_table{"fig3_bloch", {"t_s", "px", "py", "pz"}, {}};
    for (const auto& s : window) traj_table.add_row({s.t, s.p.px, s.p.py, s.p.pz});

    Table faraday_table{"fig3_faraday", {"t_s", "theta_rad"}, {}};
    for (const auto& s : theta_series) faraday_table.add_row({s.t, s.theta});

    Table t{"fig3", {"t_s", "beta_rad", "theta_rad", "theta_tilde_rad", "eta", "status"}, {}};
    json per_beta = json::array();
    for (double beta : sorted_betas(cfg)) {
        double min_eta = std::numeric_limits<double>::infinity();
        double max_abs_tilde = 0.0;
        std::size_t dark = 0;
        for (const auto& s : theta_series) {
            if (s.theta == 0.0) {
                t.add_row({s.t, beta, s.theta, 0.0, Empty{}, std::string("zero")});
                continue;
            }
            try {
                // The amplified angle carries the sign of the true rotation.
                const auto ps = mzi::postselect(std::abs(s.theta), beta, cfg.mzi->p_min);
                const double tilde = std::copysign(ps.theta_tilde, s.theta);
                const double eta = tilde / s.theta;
                min_eta = std::min(min_eta, eta);
                max_abs_tilde = std::max(max_abs_tilde, ps.theta_tilde);
                t.add_row({s.t, beta, s.theta, tilde, eta, std::string("ok")});
            } catch (const DarkPortError&) {
                t.add_row({s.t, beta, s.theta, Empty{}, Empty{}, std::string("dark_port")});
                ++dark;
            }
        }
        per_beta.push_back({{"beta_rad", beta},
                            {"min_eta", std::isfinite(min_eta) ? json(min_eta) : json(nullptr)},
                            {"max_abs_theta_tilde_rad", max_abs_tilde},
                            {"dark_port_rows", dark}});
    }

    double max_abs_theta = 0.0;
    for (const auto& s : theta_series) max_abs_theta = std::max(max_abs_theta, std::abs(s.theta));

    res.summary["pz0"] = lr.pz0;
    res.summary["amp_factor_m_per_nt"] = lr.amp_factor_m;
    res.summary["phase_delay_rad"] = lr.phase_delay;
    res.summary["px_amplitude_linear_response"] = lr.px_amplitude(sp.fields.by_amp);
    res.summary["transient_s"] = t0;
    res.summary["max_abs_theta_rad"] = max_abs_theta;
    res.summary["per_beta"] = per_beta;

    res.tables.push_back(std::move(t));
    res.tables.push_back(std::move(traj_table));
    res.tables.push_back(std::move(faraday_table));
    return res;
}

ExperimentResult run_fig6(const RunConfig& cfg) {
    require_sections("fig6", cfg);
    Table t{"fig6",
            {"v0", "delta1", "delta2", "t_h", "r_v", "v_meas", "v_cal", "v_tilde", "phi"},
            {}};
    auto splitters = cfg.splitters;
    std::stable_sort(splitters.begin(), splitters.end(), [](const auto& a, const auto& b) {
        return std::tie(a.delta1, a.delta2) < std::tie(b.delta1, b.delta2);
    });
    const auto v0s = axis(cfg, "v0").values();
    for (const auto& p : splitters) {
        const double v_cal = pbs::calibration_ratio(p);
        for (double v0 : v0s) {
            t.add_row({v0, p.delta1, p.delta2, p.t_h, p.r_v, pbs::measured_ratio(v0, p), v_cal,
                       pbs::calibrated_ratio(v0, p), pbs::error_ratio(v0, p)});
        }
    }
    ExperimentResult res;
    res.summary["curves"] = splitters.size();
    res.tables.push_back(std::move(t));
    return res;
}

ExperimentResult run_snr(const RunConfig& cfg) {
    require_sections("snr", cfg);
    Table t{"snr",
            {"theta_rad", "beta_rad", "n_photons", "p_f", "theta_tilde_rad", "snr_psa", "snr_conv",
             "ratio", "pf_n"},
            {}};
    const double n = cfg.detector->n_photons;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double beta : sorted_betas(cfg)) {
        for (double theta : axis(cfg, "theta").values()) {
            const auto c = detection::snr_compare(theta, beta, n);
            lo = std::min(lo, c.ratio());
            hi = std::max(hi, c.ratio());
            t.add_row({theta, beta, n, c.p_f, c.theta_tilde, c.snr_psa, c.snr_conventional,
                       c.ratio(), c.p_f * n});
        }
    }
    ExperimentResult res;
    res.summary["min_ratio"] = lo;
    res.summary["max_ratio"] = hi;
    res.tables.push_back(std::move(t));
    return res;
}

ExperimentResult run_saturation(const RunConfig& cfg) {
    require_sections("saturation", cfg);
    const auto& st = *cfg.study;
    const auto n_grid = axis(cfg, "n_photons").values();
    const auto rows = detection::saturation_study(st.theta, st.beta, n_grid, cfg.detector->i_sat,
                                                  st.trials, cfg.seed);
    Table t{"saturation",
            {"n_photons", "p_f", "theta_true_rad", "rms_err_psa_rad", "rms_err_conv_rad", "trials",
             "seed"},
            {}};
    for (const auto& r : rows)
        t.add_row({r.n_photons, r.p_f, r.theta_true, r.rms_err_psa, r.rms_err_conv,
                   static_cast<std::uint64_t>(r.trials), r.seed});

    ExperimentResult res;
    res.summary["beta_rad"] = st.beta;
    res.summary["i_sat"] = cfg.detector->i_sat ? json(*cfg.detector->i_sat) : json("unlimited");
    res.tables.push_back(std::move(t));
    return res;
}

ExperimentResult run_command(const std::string& command, const RunConfig& cfg) {
    if (command == "fig2a") return run_fig2a(cfg);
    if (command == "fig2b") return run_fig2b(cfg);
    if (command == "fig3") return run_fig3(cfg);
    if (command == "fig6") return run_fig6(cfg);
    if (command == "snr") return run_snr(cfg);
    if (command == "saturation") return run_saturation(cfg);
    throw ValidationError(fmt::format("unknown command '{}'", command));
}

} // namespace magsim
