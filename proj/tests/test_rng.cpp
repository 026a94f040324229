#include <catch2/catch_amalgamated.hpp>

#include "driftnet/rng.hpp"

using driftnet::Rng;

TEST_CASE("same seed, same stream", "[rng]") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform stays in [0,1)", "[rng]") {
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("degenerate draws do not touch the stream", "[rng]") {
    Rng a(7), b(7);
    REQUIRE_FALSE(a.bernoulli(0.0));
    REQUIRE(a.bernoulli(1.0));
    REQUIRE(a.normal(3.5, 0.0) == 3.5);
    REQUIRE(a.poisson(0.0) == 0);
    REQUIRE(a.uniform_int(1) == 0);
    REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("poisson and geometric means", "[rng]") {
    Rng r(11);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(r.poisson(6.0));
    REQUIRE(sum / n == Catch::Approx(6.0).margin(0.1));

    sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(r.geometric(1.0 / 75.0));
    REQUIRE(sum / n == Catch::Approx(75.0).epsilon(0.03));
}

TEST_CASE("normal moments", "[rng]") {
    Rng r(5);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal(2.0, 3.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    REQUIRE(mean == Catch::Approx(2.0).margin(0.05));
    REQUIRE(var == Catch::Approx(9.0).epsilon(0.03));
}

TEST_CASE("uniform_int bounds and balance", "[rng]") {
    Rng r(3);
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 50000; ++i) ++counts[r.uniform_int(5)];
    for (int c : counts) REQUIRE(c == Catch::Approx(10000).epsilon(0.05));
}

TEST_CASE("save and restore resume the identical stream", "[rng]") {
    Rng a(99);
    for (int i = 0; i < 37; ++i) a.next_u64();
    const std::string state = a.save();
    Rng b;
    b.restore(state);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    Rng c;
    REQUIRE_THROWS(c.restore("not a state"));
}
