#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "driftnet/hazards.hpp"
#include "driftnet/rng.hpp"

using namespace driftnet;

TEST_CASE("weibull hazard with shape 1 is the constant rate", "[hazards]") {
    for (double x : {0.0, 1.0, 50.0, 3650.0})
        REQUIRE(weibull_hazard(x, 0.013, 1.0) == Catch::Approx(0.013).epsilon(1e-12));
}

TEST_CASE("weibull hazard matches an independent evaluation", "[hazards]") {
    // shape 2, mean rate 0.01: lambda = p * Gamma(1.5), h(x) = 2 lambda^2 x
    const double lambda = 0.01 * std::tgamma(1.5);
    const double expected = (lambda * 2.0) * (lambda * 100.0);
    REQUIRE(weibull_hazard(100.0, 0.01, 2.0) == Catch::Approx(expected).epsilon(1e-12));
    REQUIRE(expected == Catch::Approx(0.015708).epsilon(1e-4));
    REQUIRE_THROWS_AS(weibull_hazard(1.0, 0.0, 2.0), ConfigError);
    REQUIRE_THROWS_AS(weibull_hazard(1.0, 0.1, 0.0), ConfigError);
}

TEST_CASE("weibull event times have mean 1/p", "[hazards]") {
    Rng rng(17);
    const double p = 0.02;
    const int n = 40000;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        std::int64_t day = 1;
        while (!rng.bernoulli(weibull_hazard(static_cast<double>(day), p, 1.0))) ++day;
        total += static_cast<double>(day);
    }
    REQUIRE(total / n == Catch::Approx(50.0).epsilon(0.02));
}

TEST_CASE("period rate conversion", "[hazards]") {
    REQUIRE(convert_period_rate(0.0, 365) == 0.0);
    REQUIRE(convert_period_rate(0.5, 2) ==
            Catch::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-12));
    // round trip p -> p_a -> p
    const double p = 0.0013;
    const double p_a = 1.0 - std::pow(1.0 - p, 365.0);
    REQUIRE(convert_period_rate(p_a, 365) == Catch::Approx(p).margin(1e-12));
}

TEST_CASE("tradeoff scales as 2^gamma and hits its calibration point", "[hazards]") {
    TradeoffParams tr;
    tr.curvature = 2.0;
    tr.scale = tradeoff_scale_from(0.008, 1.0 / 3650.0, 2.0);
    REQUIRE(tr.virulence(0.008) == Catch::Approx(1.0 / 3650.0).epsilon(1e-12));
    for (double beta : {0.004, 0.008, 0.12})
        REQUIRE(tr.virulence(2.0 * beta) / tr.virulence(beta) ==
                Catch::Approx(std::pow(2.0, tr.curvature)).epsilon(1e-12));
}

TEST_CASE("calibrated virulence gives ten-year mean survival", "[hazards]") {
    TradeoffParams tr;
    tr.curvature = 2.0;
    tr.scale = tradeoff_scale_from(0.008, 1.0 / 3650.0, 2.0);
    const double alpha = tr.virulence(0.008);
    Rng rng(23);
    const int hosts = 5000;
    double total = 0.0;
    for (int i = 0; i < hosts; ++i) {
        std::int64_t day = 1;
        while (!rng.bernoulli(alpha)) ++day;
        total += static_cast<double>(day);
    }
    REQUIRE(total / hosts == Catch::Approx(3650.0).epsilon(0.05));
}
