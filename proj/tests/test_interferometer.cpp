#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "magsim/error.hpp"
#include "magsim/interferometer.hpp"
#include "support.hpp"

using namespace magsim;
using namespace magsim::mzi;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I{0.0, 1.0};

// (1H, 1V, 2H, 2V) written out by hand: rotation on path 1 only.
std::vector<cplx> joint_state(double theta) {
    const double s = 1.0 / std::sqrt(2.0);
    return {s * std::cos(theta), -I * s * std::sin(theta), s, 0.0};
}

// Unnormalized <f|psi> with <f| = (<1| + e^{-i beta}<2|)/sqrt(2).
std::vector<cplx> project(const std::vector<cplx>& psi, double beta) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx ph = std::polar(1.0, -beta);
    return {s * (psi[0] + ph * psi[2]), s * (psi[1] + ph * psi[3])};
}

std::vector<cplx> postselected_family(double theta, double beta) {
    auto v = project(joint_state(theta), beta);
    const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
    for (auto& a : v) a /= n;
    return v;
}

// 4(<d psi|d psi> - |<psi|d psi>|^2), fourth-order central differences.
template <class F>
double fd_qfi(F&& family, double theta, double h) {
    const auto p = family(theta);
    const auto a = family(theta - 2 * h), b = family(theta - h), c = family(theta + h),
               d = family(theta + 2 * h);
    double dd = 0.0;
    cplx overlap{};
    for (std::size_t k = 0; k < p.size(); ++k) {
        const cplx dk = (a[k] - 8.0 * b[k] + 8.0 * c[k] - d[k]) / (12.0 * h);
        dd += std::norm(dk);
        overlap += std::conj(p[k]) * dk;
    }
    return 4.0 * (dd - std::norm(overlap));
}

} // namespace

TEST_CASE("entangled_state") {
    const double s = 1.0 / std::sqrt(2.0);
    const auto z = entangled_state(0.0);
    CHECK(std::abs(z.at(Path::One, Pol::H) - s) < 1e-15);
    CHECK(std::abs(z.at(Path::One, Pol::V)) < 1e-15);
    CHECK(std::abs(z.at(Path::Two, Pol::H) - s) < 1e-15);
    CHECK(std::abs(z.at(Path::Two, Pol::V)) < 1e-15);

    const auto q = entangled_state(kPi / 2);
    CHECK(std::abs(q.at(Path::One, Pol::H)) < 1e-15);
    CHECK(std::abs(q.at(Path::One, Pol::V) - (-I * s)) < 1e-15);
    CHECK(std::abs(q.at(Path::Two, Pol::H) - s) < 1e-15);

    for (const auto& [th, be] : testing::random_angles(1000, 11)) {
        const auto st = entangled_state(th);
        CHECK(std::abs(st.norm_squared() - 1.0) < 1e-12);
        const auto ref = joint_state(th);
        for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(st.amplitudes[k] - ref[k]) < 1e-15);
    }
}

TEST_CASE("conventional_state") {
    const auto s = conventional_state(0.4);
    CHECK(std::abs(s.h - std::cos(0.4)) < 1e-15);
    CHECK(std::abs(s.v - (-I * std::sin(0.4))) < 1e-15);
}

TEST_CASE("postselection_probability") {
    CHECK(postselection_probability(0.0, kPi) == doctest::Approx(0.0));
    CHECK(postselection_probability(kPi / 2, 0.3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(postselection_probability(kPi / 2, 2.9) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(postselection_probability(0.01, 0.997 * kPi) == doctest::Approx(4.7205e-5).epsilon(1e-4));

    SUBCASE("equals the squared projection of the raw amplitudes") {
        for (const auto& [th, be] : testing::random_angles(10000, 42)) {
            const auto v = project(joint_state(th), be);
            const double direct = std::norm(v[0]) + std::norm(v[1]);
            CHECK(std::abs(postselection_probability(th, be) - direct) < 1e-12);

            const auto lib = project_onto_port(entangled_state(th), be);
            CHECK(std::abs(lib.norm_squared() - direct) < 1e-12);
        }
    }
}

TEST_CASE("postselect") {
    SUBCASE("no rotation, quarter-wave port: pure H") {
        const auto o = postselect(0.0, kPi / 2);
        CHECK(o.pv_tilde == 0.0);
        CHECK(o.theta_tilde == 0.0);
        CHECK_FALSE(o.eta.has_value());
        CHECK(std::abs(o.pol_state.v) == 0.0);
        CHECK(std::norm(o.pol_state.h) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("near-dark port amplification") {
        const auto o = postselect(0.001, 0.997 * kPi);
        CHECK(o.p_f == doctest::Approx(2.245e-5).epsilon(1e-3));
        CHECK(o.theta_tilde == doctest::Approx(0.1057).epsilon(1e-3));
        REQUIRE(o.eta.has_value());
        CHECK(*o.eta == doctest::Approx(105.7).epsilon(1e-3));
        CHECK(*o.eta > 100.0);
    }
    SUBCASE("dark port is rejected") {
        CHECK_THROWS_AS(postselect(0.0, kPi), DarkPortError);
        CHECK_THROWS_AS(pv_tilde(0.0, kPi), DarkPortError);
        CHECK_THROWS_AS(qfi_postselected(0.0, kPi), DarkPortError);
        CHECK_THROWS_AS(postselect(0.1, 0.9 * kPi, 0.1), DarkPortError);
    }
    SUBCASE("beta outside [0, 2 pi)") {
        CHECK_THROWS_AS(postselect(0.1, 2.0 * kPi), DomainError);
        CHECK_THROWS_AS(postselect(0.1, -0.1), DomainError);
    }
    SUBCASE("state matches the normalized projection") {
        for (const auto& [th, be] : testing::random_angles(10000, 5)) {
            if (postselection_probability(th, be) <= 1e-12) continue;
            const auto o = postselect(th, be);
            const auto ref = postselected_family(th, be);
            CHECK(std::abs(o.pol_state.norm_squared() - 1.0) < 1e-12);
            CHECK(std::abs(o.pol_state.h - ref[0]) < 1e-9);
            CHECK(std::abs(o.pol_state.v - ref[1]) < 1e-9);
            CHECK(std::abs(o.pv_tilde - std::norm(o.pol_state.v)) < 1e-12);
            CHECK(o.pv_tilde >= 0.0);
            CHECK(o.pv_tilde <= 1.0);
            CHECK(o.theta_tilde >= 0.0);
            CHECK(o.theta_tilde <= kPi / 2);
        }
    }
}

TEST_CASE("pv_tilde") {
    CHECK(pv_tilde(0.0, 1.0) == 0.0);
    for (double th : {0.1, 0.7, 1.5})
        CHECK(pv_tilde(th, kPi / 2) == doctest::Approx(std::pow(std::sin(th), 2) / 2).epsilon(1e-14));
    CHECK(pv_tilde(0.01, 0.997 * kPi) == doctest::Approx(0.5296).epsilon(1e-3));
}

TEST_CASE("QFI closed forms") {
    CHECK(qfi_postselected(0.0, kPi / 2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(qfi_postselected(kPi / 2, kPi / 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(qfi_postselected(0.01, 0.997 * kPi) == doctest::Approx(9.97e3).epsilon(2e-3));
    CHECK(qfi_postselected(0.01, 0.997 * kPi) > 4.0);
    for (double th : {0.0, 0.3, kPi / 4}) CHECK(qfi_entangled(th) == 2.0);
    for (double th : {0.0, 0.5, 1.2}) CHECK(qfi_conventional(th) == 4.0);
}

TEST_CASE("QFI against finite differences") {
    SUBCASE("entangled and conventional families") {
        for (double th : {0.0, 0.3, kPi / 4, 1.2}) {
            CHECK(std::abs(fd_qfi(joint_state, th, 1e-3) - 2.0) < 1e-6);
            auto conv = [](double t) { return std::vector<cplx>{std::cos(t), -I * std::sin(t)}; };
            CHECK(std::abs(fd_qfi(conv, th, 1e-3) - 4.0) < 1e-6);
        }
    }
    SUBCASE("library qfi_numeric on the same families") {
        StateFamily ent = [](double t) {
            const auto s = entangled_state(t);
            return std::vector<cplx>(s.amplitudes.begin(), s.amplitudes.end());
        };
        StateFamily conv = [](double t) {
            const auto s = conventional_state(t);
            return std::vector<cplx>{s.h, s.v};
        };
        for (double th : {0.0, 0.3, kPi / 4}) {
            CHECK(std::abs(qfi_numeric(ent, th, 1e-5) - 2.0) < 1e-6);
            CHECK(std::abs(qfi_numeric(conv, th, 1e-5) - 4.0) < 1e-6);
        }
        CHECK_THROWS_AS(qfi_numeric(ent, 0.1, 0.0), DomainError);
    }
    SUBCASE("postselected family") {
        const double beta = 0.997 * kPi;
        auto fam = [beta](double t) { return postselected_family(t, beta); };
        const double closed = qfi_postselected(0.01, beta);
        CHECK(std::abs(fd_qfi(fam, 0.01, 1e-5) / closed - 1.0) < 1e-4);
    }
    SUBCASE("random pairs away from the dark port") {
        int checked = 0;
        for (const auto& [th, be] : testing::random_angles(2000, 99)) {
            if (postselection_probability(th, be) <= 1e-6) continue;
            // Keep the stencil inside a region where p_f stays well above zero.
            const double pf = postselection_probability(th, be);
            const double h = std::min(1e-4, 0.01 * std::sqrt(pf));
            auto fam = [be](double t) { return postselected_family(t, be); };
            const double closed = qfi_postselected(th, be);
            CHECK(closed >= 0.0);
            CHECK(std::abs(fd_qfi(fam, th, h) - closed) <= 1e-4 * std::max(closed, 1e-2));
            ++checked;
        }
        CHECK(checked > 1000);
    }
}

TEST_CASE("amplification_curve") {
    std::vector<double> grid;
    for (int i = 1; i <= 200; ++i) grid.push_back(i * (kPi / 2) / 200);

    SUBCASE("beta = pi/2") {
        const auto c = amplification_curve(grid, kPi / 2);
        REQUIRE(c.size() == grid.size());
        for (const auto& p : c) {
            REQUIRE(p.theta_tilde.has_value());
            CHECK(*p.theta_tilde ==
                  doctest::Approx(std::asin(std::sin(p.theta) / std::sqrt(2.0))).epsilon(1e-13));
        }
    }
    SUBCASE("beta = 0 de-amplifies") {
        for (const auto& p : amplification_curve(grid, 0.0)) CHECK(*p.theta_tilde <= p.theta + 1e-15);
    }
    SUBCASE("rises to a single peak, then falls back to pi/4 at pi/2") {
        // d pv / d cos(theta) vanishes where cos(beta) c^2 + 2c + cos(beta) = 0.
        for (double b : {0.6 * kPi, 0.9 * kPi, 0.99 * kPi, 0.997 * kPi}) {
            const double c_peak = (1.0 - std::sin(b)) / -std::cos(b);
            const double th_peak = std::acos(c_peak);
            const auto c = amplification_curve(grid, b);
            for (std::size_t i = 1; i < c.size(); ++i) {
                if (c[i].theta <= th_peak)
                    CHECK(*c[i].theta_tilde >= *c[i - 1].theta_tilde);
                else if (c[i - 1].theta >= th_peak)
                    CHECK(*c[i].theta_tilde <= *c[i - 1].theta_tilde);
            }
            CHECK(*c.back().theta_tilde == doctest::Approx(kPi / 4).epsilon(1e-12));
        }
    }
    SUBCASE("small-angle slope") {
        const double beta = 0.997 * kPi;
        const double limit = 1.0 / (2.0 * std::sqrt((1.0 + std::cos(beta)) / 2.0));
        CHECK(limit == doctest::Approx(106.1).epsilon(1e-3));
        std::vector<double> tiny{1e-7};
        const auto c = amplification_curve(tiny, beta);
        CHECK(*c[0].theta_tilde / 1e-7 == doctest::Approx(limit).epsilon(1e-6));
    }
    SUBCASE("eta follows arcsin of the linear law") {
        // eta = asin(x)/theta with x = sin(theta)/(2 sqrt(p_f)); the linear law
        // x/theta is approached with relative error ~ x^2/6.
        const double beta = 0.997 * kPi;
        for (double th : {1e-6, 1e-5, 1e-4, 3e-4, 1e-3}) {
            const auto o = postselect(th, beta);
            const double x = std::sin(th) / (2.0 * std::sqrt(o.p_f));
            CHECK(*o.eta == doctest::Approx(std::asin(x) / th).epsilon(1e-12));
            const double lin = 1.0 / (2.0 * std::sqrt(o.p_f));
            CHECK(std::abs(*o.eta - lin) / *o.eta <= x * x / 6.0 * 1.01 + 1e-12);
        }
    }
    SUBCASE("dark-port points are flagged, not fatal") {
        std::vector<double> g{0.0, 0.1};
        const auto c = amplification_curve(g, kPi);
        CHECK_FALSE(c[0].theta_tilde.has_value());
        CHECK(c[1].theta_tilde.has_value());
    }
}

TEST_CASE("QFI anomaly region is nonempty") {
    int above = 0;
    for (const auto& [th, be] : testing::random_angles(10000, 3)) {
        if (postselection_probability(th, be) <= 1e-15) continue;
        if (qfi_postselected(th, be) > 4.0) ++above;
    }
    CHECK(above > 0);
}
