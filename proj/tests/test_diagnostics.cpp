#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "driftnet/diagnostics.hpp"
#include "driftnet/rng.hpp"

using namespace driftnet;

TEST_CASE("ECF basics", "[diagnostics]") {
    EcfConfig cfg;
    cfg.grid_points = 64;
    cfg.a_max = 4.0;

    SECTION("c(0) = 1 exactly at every count") {
        EcfAccumulator acc(cfg);
        Rng rng(81);
        for (int i = 0; i < 500; ++i) {
            acc.update(rng.uniform() * 10.0);
            const auto c = acc.eval();
            REQUIRE(c[0].real() == 1.0);
            REQUIRE(c[0].imag() == 0.0);
        }
    }
    SECTION("constant series gives cos(ac) + i sin(ac) exactly") {
        EcfAccumulator acc(cfg);
        const double v = 1.7;
        for (int i = 0; i < 100; ++i) acc.update(v);
        const auto c = acc.eval();
        const auto& grid = acc.grid();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            REQUIRE(c[k].real() == Catch::Approx(std::cos(grid[k] * v)).margin(1e-12));
            REQUIRE(c[k].imag() == Catch::Approx(std::sin(grid[k] * v)).margin(1e-12));
        }
    }
    SECTION("modulus never exceeds one") {
        EcfAccumulator acc(cfg);
        Rng rng(82);
        for (int i = 0; i < 2000; ++i) {
            acc.update(rng.normal(0.0, 3.0));
            for (const auto& z : acc.eval()) REQUIRE(std::abs(z) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("ECF of a standard normal matches exp(-a^2/2)", "[diagnostics]") {
    EcfConfig cfg;
    cfg.grid_points = 64;
    cfg.a_max = 0.0; // auto: 8 / sd, sd ~ 1
    EcfAccumulator acc(cfg);
    Rng rng(83);
    for (int i = 0; i < 100000; ++i) acc.update(rng.normal());
    acc.finalize();
    const auto c = acc.eval();
    const auto& grid = acc.grid();
    REQUIRE(acc.a_max() == Catch::Approx(8.0).epsilon(0.1));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid[k] > 3.0) break;
        const double target = std::exp(-grid[k] * grid[k] / 2.0);
        REQUIRE(std::abs(c[k].real() - target) < 0.02);
        REQUIRE(std::abs(c[k].imag()) < 0.02);
    }
}

TEST_CASE("ECF of a stationary series stabilizes over dyadic checkpoints",
          "[diagnostics]") {
    EcfConfig cfg;
    cfg.grid_points = 32;
    cfg.a_max = 5.0;
    EcfAccumulator acc(cfg);
    Rng rng(84);
    std::vector<std::vector<std::complex<double>>> snaps;
    Step next = 256;
    for (Step t = 1; t <= 65536; ++t) {
        acc.update(rng.uniform());
        if (t == next) {
            snaps.push_back(acc.eval());
            next *= 2;
        }
    }
    std::vector<double> drift;
    for (std::size_t i = 1; i < snaps.size(); ++i) {
        double d = 0.0;
        for (std::size_t k = 0; k < snaps[i].size(); ++k)
            d = std::max(d, std::abs(snaps[i][k] - snaps[i - 1][k]));
        drift.push_back(d);
    }
    for (std::size_t i = 1; i < drift.size(); ++i)
        REQUIRE(drift[i] <= drift[i - 1] + 0.05);
    REQUIRE(drift.back() < drift.front());
}

TEST_CASE("cumulative mean and histogram", "[diagnostics]") {
    SECTION("hand-checked prefix means") {
        const auto means = cumulative_means({1.0, 2.0, 3.0});
        REQUIRE(means == std::vector<double>{1.0, 1.5, 2.0});
    }
    SECTION("constant series is flat") {
        const auto means = cumulative_means(std::vector<double>(50, 0.7));
        for (double m : means) REQUIRE(m == Catch::Approx(0.7).margin(1e-12));
    }
    SECTION("LLN for Bernoulli(0.3)") {
        CumulativeTracker tracker(10, 0.0, 1.0);
        Rng rng(85);
        for (int i = 0; i < 100000; ++i) tracker.update(rng.bernoulli(0.3) ? 1.0 : 0.0);
        REQUIRE(std::abs(tracker.mean() - 0.3) < 0.01);
        REQUIRE(tracker.histogram().front() + tracker.histogram().back() == 100000);
    }
    SECTION("tracker mean equals recomputation, exactly") {
        CumulativeTracker tracker(4, 0.0, 1.0);
        Rng rng(86);
        std::vector<double> xs;
        for (int i = 0; i < 1000; ++i) {
            xs.push_back(rng.uniform());
            tracker.update(xs.back());
        }
        const double recomputed =
            std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        REQUIRE(tracker.mean() == recomputed);
    }
}

TEST_CASE("infection-recency degree strata", "[diagnostics]") {
    SECTION("no infections leaves only the never stratum") {
        Population pop;
        for (int i = 0; i < 4; ++i) pop.add_node(Node{});
        pop.add_edge(0, 1, 0);
        const StrataMeans m = infection_degree_comparison(pop, 100, 30);
        REQUIRE_FALSE(m.degree_recent.has_value());
        REQUIRE_FALSE(m.degree_longer.has_value());
        REQUIRE(m.degree_never.has_value());
        REQUIRE(*m.degree_never == Catch::Approx(0.5));
    }
    SECTION("hand-built hub: recent stratum mean equals the hub degree") {
        Population pop;
        for (int i = 0; i < 5; ++i) pop.add_node(Node{});
        for (int i = 1; i < 5; ++i) pop.add_edge(0, static_cast<NodeId>(i), 0);
        Infection inf;
        inf.strain = Strain::from_factor(0.008, 15.0, 0, 1);
        inf.infected_at = 95; // 5 days ago
        pop.nodes[0].infection = inf;
        pop.nodes[0].first_infected_at = 95;
        const StrataMeans m = infection_degree_comparison(pop, 100, 30);
        REQUIRE(*m.degree_recent == Catch::Approx(4.0));
        REQUIRE(*m.outdegree_recent == Catch::Approx(4.0)); // all partners clean
        REQUIRE(*m.degree_never == Catch::Approx(1.0));
        REQUIRE_FALSE(m.degree_longer.has_value());
    }
    SECTION("cured nodes belong to no stratum") {
        Population pop;
        pop.add_node(Node{});
        pop.nodes[0].first_infected_at = 10; // ever infected, currently clear
        const StrataMeans m = infection_degree_comparison(pop, 100, 30);
        REQUIRE_FALSE(m.degree_recent.has_value());
        REQUIRE_FALSE(m.degree_longer.has_value());
        REQUIRE_FALSE(m.degree_never.has_value());
    }
}

TEST_CASE("window stats and paired comparison", "[diagnostics]") {
    SECTION("hand-checked window") {
        const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        const WindowStats w = window_stats(s, 6, 10);
        REQUIRE(w.count == 5);
        REQUIRE(w.mean == Catch::Approx(8.0));
        REQUIRE(w.q50 == Catch::Approx(8.0));
        REQUIRE(w.q05 == Catch::Approx(6.2));
        REQUIRE_THROWS_AS(window_stats(s, 0, 5), ConfigError);
        REQUIRE_THROWS_AS(window_stats(s, 5, 11), ConfigError);
    }
    SECTION("identical scenarios have exactly zero paired differences") {
        const std::vector<std::vector<double>> runs = {{0.1, 0.2, 0.3, 0.4},
                                                       {0.2, 0.3, 0.4, 0.5}};
        const ScenarioComparison cmp = compare_runs(runs, runs, 2, 4, "prevalence");
        for (double d : cmp.paired_diffs) REQUIRE(d == 0.0);
        REQUIRE(cmp.mean_diff == 0.0);
        REQUIRE(cmp.pairs_lower == 0);
    }
    SECTION("a uniformly lower treatment is lower in every pair") {
        std::vector<std::vector<double>> base, treat;
        Rng rng(87);
        for (int r = 0; r < 10; ++r) {
            std::vector<double> b, t;
            for (int i = 0; i < 50; ++i) {
                const double v = 0.3 + 0.1 * rng.uniform();
                b.push_back(v);
                t.push_back(v * 0.5);
            }
            base.push_back(b);
            treat.push_back(t);
        }
        const ScenarioComparison cmp = compare_runs(base, treat, 10, 50, "prevalence");
        REQUIRE(cmp.pairs_lower == 10);
        REQUIRE(cmp.mean_diff < 0.0);
        REQUIRE_THROWS_AS(compare_runs(base, {treat[0]}, 10, 50, "prevalence"),
                          ConfigError);
    }
    SECTION("mismatched horizons are rejected") {
        const std::vector<std::vector<double>> a = {{1.0, 2.0, 3.0}};
        const std::vector<std::vector<double>> b = {{1.0, 2.0}};
        REQUIRE_THROWS_AS(compare_runs(a, b, 1, 2, "prevalence"), ConfigError);
    }
}

TEST_CASE("ECF tail dispersion is zero for identical snapshots", "[diagnostics]") {
    EcfConfig cfg;
    cfg.grid_points = 16;
    cfg.a_max = 2.0;
    EcfAccumulator acc(cfg);
    Rng rng(88);
    for (int i = 0; i < 100; ++i) acc.update(rng.uniform());
    const auto snap = acc.eval();
    REQUIRE(ecf_tail_dispersion(snap, snap) == 0.0);
    for (int i = 0; i < 100; ++i) acc.update(rng.uniform() + 5.0);
    REQUIRE(ecf_tail_dispersion(snap, acc.eval()) > 0.0);
}
