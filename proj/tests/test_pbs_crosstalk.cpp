#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "magsim/error.hpp"
#include "magsim/pbs_crosstalk.hpp"

using namespace magsim;
using namespace magsim::pbs;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (n - 1));
    v.back() = hi;
    return v;
}

} // namespace

TEST_CASE("measured_ratio") {
    const auto ideal = PbsParams::lossless(0.0, 0.0);
    for (double v0 : {1e-6, 0.01, 1.0, 37.0}) CHECK(measured_ratio(v0, ideal) == v0);

    PbsParams p{0.9, 0.8, 0.02, 0.03, 1.5, 0.7};
    CHECK(measured_ratio(1.0, p) == doctest::Approx(0.7 * (0.02 + 0.8) / (1.5 * (0.9 + 0.03))).epsilon(1e-14));

    const auto fig = PbsParams::lossless(0.005, 0.005);
    CHECK(fig.t_h == 0.995);
    CHECK(measured_ratio(0.01, fig) == doctest::Approx(0.014950 / 0.99505).epsilon(1e-6));
    CHECK(std::abs(measured_ratio(0.01, fig) - 0.015024) < 1e-6);
}

TEST_CASE("calibration_ratio") {
    CHECK(calibration_ratio(PbsParams::lossless(0.0, 0.0)) == 1.0);
    CHECK(calibration_ratio(PbsParams::lossless(0.0, 0.0, 1.0, 2.0)) == 2.0);
    CHECK(calibration_ratio(PbsParams::lossless(0.005, 0.005)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("calibrated_ratio") {
    SUBCASE("ideal splitter recovers v0 for any converter coefficients") {
        for (double v0 : {1e-8, 1e-4, 0.3, 1.0, 12.0}) {
            CHECK(std::abs(calibrated_ratio(v0, PbsParams::lossless(0.0, 0.0, 0.3, 4.0)) - v0) <= 1e-12 * v0);
        }
    }
    SUBCASE("floor set by the cross-talk") {
        PbsParams p{0.99, 0.98, 0.004, 0.007, 1.0, 1.0};
        const double floor = p.delta1 * (p.t_h + p.delta2) / (p.t_h * (p.delta1 + p.r_v));
        CHECK(calibrated_ratio(1e-14, p) == doctest::Approx(floor).epsilon(1e-9));
        CHECK(floor > 0.0);
    }
    SUBCASE("Fig. 6 style point") {
        const auto fig = PbsParams::lossless(0.005, 0.005);
        CHECK(std::abs(calibrated_ratio(0.01, fig) - 0.015024) < 1e-5);
        auto scaled = fig;
        scaled.eta_r = 3.7;
        CHECK(calibrated_ratio(0.01, scaled) == doctest::Approx(calibrated_ratio(0.01, fig)).epsilon(1e-14));
    }
    SUBCASE("converter coefficients cancel") {
        std::mt19937_64 gen(123);
        std::uniform_real_distribution<double> le(-3.0, 3.0);
        std::uniform_real_distribution<double> d(1e-3, 1e-2);
        for (int i = 0; i < 1000; ++i) {
            auto p = PbsParams::lossless(d(gen), d(gen));
            const double v0 = std::pow(10.0, le(gen) - 1.0);
            const double base = calibrated_ratio(v0, p);
            p.eta_t = std::pow(10.0, le(gen));
            p.eta_r = std::pow(10.0, le(gen));
            CHECK(std::abs(calibrated_ratio(v0, p) - base) <= 1e-12 * base);
        }
    }
}

TEST_CASE("error_ratio") {
    CHECK(error_ratio(0.01, PbsParams::lossless(0.0, 0.0)) == 0.0);

    const auto fig = PbsParams::lossless(0.005, 0.005);
    CHECK(std::abs(error_ratio(0.01, fig) - 0.5024) < 1e-3);
    CHECK(error_ratio(0.1, fig) < error_ratio(0.01, fig));
    CHECK(error_ratio(1e-6, fig) > 100.0 * error_ratio(1e-2, fig));

    SUBCASE("strictly decreasing in v0 over [1e-4, 1]") {
        const auto grid = log_grid(1e-4, 1.0, 400);
        for (double d1 : {1e-3, 3e-3, 5e-3, 1e-2}) {
            for (double d2 : {1e-3, 5e-3, 1e-2}) {
                const auto p = PbsParams::lossless(d1, d2);
                for (std::size_t i = 1; i < grid.size(); ++i)
                    CHECK(error_ratio(grid[i], p) < error_ratio(grid[i - 1], p));
            }
        }
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(error_ratio(0.0, fig), DomainError);
        CHECK_THROWS_AS(calibrated_ratio(-1.0, fig), DomainError);
        CHECK_THROWS_AS(measured_ratio(INFINITY, fig), DomainError);
    }
}

TEST_CASE("PbsParams validation") {
    CHECK_NOTHROW(PbsParams::lossless(0.01, 0.01).validate());
    CHECK_THROWS_AS((PbsParams{0.999, 0.9, 0.01, 0.0, 1.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((PbsParams{0.9, 0.999, 0.0, 0.01, 1.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((PbsParams{0.9, 0.9, 0.0, 0.0, 0.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((PbsParams{0.9, 0.9, 0.0, 0.0, 1.0, -1.0}.validate()), DomainError);
}

TEST_CASE("v0_from_angle") {
    CHECK(v0_from_angle(std::numbers::pi / 4).v0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v0_from_angle(0.001).v0 == doctest::Approx(1.0e-6).epsilon(1e-6));
    CHECK(v0_from_angle(0.1057).v0 == doctest::Approx(1.125e-2).epsilon(1e-3));
    CHECK_THROWS_AS(v0_from_angle(0.0), DomainError);
    CHECK_THROWS_AS(v0_from_angle(std::numbers::pi / 2), DomainError);
}
