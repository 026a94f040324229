#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "driftnet/sampling.hpp"

using namespace driftnet;

namespace {

// n isolated nodes with ids 0..n-1
Population make_nodes(int n) {
    Population pop;
    for (int i = 0; i < n; ++i) pop.add_node(Node{});
    return pop;
}

Population star_graph(int leaves) {
    Population pop = make_nodes(leaves + 1);
    for (int i = 1; i <= leaves; ++i) pop.add_edge(0, static_cast<NodeId>(i), 0);
    return pop;
}

DesignConfig design(DesignKind kind) {
    DesignConfig d;
    d.name = "d";
    d.kind = kind;
    return d;
}

} // namespace

TEST_CASE("initial designs", "[sampling]") {
    Rng rng(41);
    Population pop = make_nodes(10);

    SECTION("Bernoulli with p = 0 is empty") {
        DesignConfig d = design(DesignKind::Bernoulli);
        d.p = 0.0;
        REQUIRE(init_sample(d, pop, rng).members.empty());
    }
    SECTION("SRSWOR inclusion probability is n/N") {
        DesignConfig d = design(DesignKind::Srswor);
        d.n = 5;
        std::map<NodeId, int> hits;
        const int draws = 100000;
        for (int k = 0; k < draws; ++k)
            for (const auto& [id, info] : init_sample(d, pop, rng).members) ++hits[id];
        const double se = std::sqrt(0.5 * 0.5 / draws);
        for (const auto& [id, count] : hits)
            REQUIRE(std::abs(count / static_cast<double>(draws) - 0.5) < 3.0 * se);
    }
    SECTION("SRSWOR larger than the population is an error") {
        DesignConfig d = design(DesignKind::Srswor);
        d.n = 11;
        REQUIRE_THROWS_AS(init_sample(d, pop, rng), ConfigError);
    }
    SECTION("with-replacement distinct-count distribution") {
        Population four = make_nodes(4);
        DesignConfig d = design(DesignKind::WithReplacement);
        d.n = 3;
        // exact multinomial enumeration over 4^3 outcomes
        const double p_distinct1 = 4.0 / 64.0;
        const double p_distinct3 = 24.0 / 64.0;
        const double p_distinct2 = 1.0 - p_distinct1 - p_distinct3;
        std::map<std::size_t, int> sizes;
        const int draws = 100000;
        for (int k = 0; k < draws; ++k) ++sizes[init_sample(d, four, rng).members.size()];
        auto check = [&](std::size_t distinct, double p) {
            const double se = std::sqrt(p * (1 - p) / draws);
            REQUIRE(std::abs(sizes[distinct] / static_cast<double>(draws) - p) < 3 * se);
        };
        check(1, p_distinct1);
        check(2, p_distinct2);
        check(3, p_distinct3);
    }
    SECTION("spatial Bernoulli honors the disk") {
        Population spread = make_nodes(2);
        spread.nodes[0].pos = {0.1, 0.1};
        spread.nodes[1].pos = {0.9, 0.9};
        DesignConfig d = design(DesignKind::SpatialBernoulli);
        d.p = 1.0;
        d.center = {0.1, 0.1};
        d.radius = 0.2;
        const SampleState s = init_sample(d, spread, rng);
        REQUIRE(s.contains(0));
        REQUIRE_FALSE(s.contains(1));
    }
}

TEST_CASE("link-trace inclusion probability", "[sampling]") {
    Population pop = star_graph(3);
    SampleState s;
    s.cfg = design(DesignKind::LinkTrace);

    SECTION("no in-sample neighbors") {
        s.add_member(1, 0);
        const LinkProbFn p = [](const Node&, const Node&, const EdgeState&) { return 0.5; };
        REQUIRE(link_trace_inclusion_prob(pop.at(2), s, pop, p) == 0.0);
    }
    SECTION("two neighbors at p = 0.5 give 0.75") {
        Population tri = make_nodes(3);
        tri.add_edge(0, 2, 0);
        tri.add_edge(1, 2, 0);
        s.add_member(0, 0);
        s.add_member(1, 0);
        const LinkProbFn p = [](const Node&, const Node&, const EdgeState&) { return 0.5; };
        REQUIRE(link_trace_inclusion_prob(tri.at(2), s, tri, p) ==
                Catch::Approx(0.75).epsilon(1e-12));
    }
    SECTION("direct product for unequal link probabilities") {
        Population g = make_nodes(4);
        g.add_edge(0, 3, 0);
        g.add_edge(1, 3, 0);
        g.add_edge(2, 3, 0);
        s.add_member(0, 0);
        s.add_member(1, 0);
        s.add_member(2, 0);
        const LinkProbFn p = [](const Node& origin, const Node&, const EdgeState&) {
            if (origin.id == 0) return 0.1;
            if (origin.id == 1) return 0.2;
            return 0.3;
        };
        REQUIRE(link_trace_inclusion_prob(g.at(3), s, g, p) ==
                Catch::Approx(0.496).epsilon(1e-12));
    }
}

TEST_CASE("link-trace step", "[sampling]") {
    SECTION("nothing happens with p = 0 and p_r = 0") {
        Population pop = star_graph(4);
        SampleState s;
        s.cfg = design(DesignKind::LinkTrace);
        s.cfg.follow_p = 0.0;
        s.cfg.random_supplement_p = 0.0;
        s.add_member(0, 0);
        Rng rng(42);
        const auto ev = step_design(s, pop, 1, rng);
        REQUIRE(ev.added.empty());
    }
    SECTION("a sure link always adds its candidate") {
        Population pop = make_nodes(2);
        pop.add_edge(0, 1, 0);
        SampleState s;
        s.cfg = design(DesignKind::LinkTrace);
        s.cfg.follow_p = 1.0;
        s.add_member(0, 0);
        Rng rng(43);
        const auto ev = step_design(s, pop, 1, rng);
        REQUIRE(ev.added == std::vector<NodeId>{1});
    }
    SECTION("star-graph additions are Binomial(10, 0.3)") {
        Rng rng(44);
        const int trials = 10000;
        double total = 0.0;
        for (int k = 0; k < trials; ++k) {
            Population pop = star_graph(10);
            SampleState s;
            s.cfg = design(DesignKind::LinkTrace);
            s.cfg.follow_p = 0.3;
            s.add_member(0, 0);
            total += static_cast<double>(step_design(s, pop, 1, rng).added.size());
        }
        const double se = std::sqrt(10.0 * 0.3 * 0.7 / trials);
        REQUIRE(std::abs(total / trials - 3.0) < 3.0 * se);
    }
}

TEST_CASE("replacement damping", "[sampling]") {
    PastInfo past;
    past.last_removed = 10;
    REQUIRE(effective_selection_prob(0.4, nullptr, 0.0, 0.0, 20) == 0.4);
    REQUIRE(effective_selection_prob(0.4, &past, 1.0, 0.0, 20) == 0.4);
    REQUIRE(effective_selection_prob(0.4, &past, 0.0, 0.0, 20) == 0.0);
    REQUIRE(effective_selection_prob(0.4, &past, 0.5, 0.0, 20) ==
            Catch::Approx(0.2).epsilon(1e-12));
    // linear recovery toward full replacement
    REQUIRE(effective_selection_prob(0.4, &past, 0.5, 20.0, 20) ==
            Catch::Approx(0.4 * 0.75).epsilon(1e-12));
    REQUIRE(effective_selection_prob(0.4, &past, 0.5, 10.0, 20) == 0.4);
}

TEST_CASE("removal step", "[sampling]") {
    REQUIRE(target_size_removal_q(80, 100) == 0.0);
    REQUIRE(target_size_removal_q(100, 100) == 0.0);
    REQUIRE(target_size_removal_q(120, 100) == Catch::Approx(1.0 / 6.0).epsilon(1e-12));

    SECTION("no removals at or below target") {
        Population pop = make_nodes(50);
        SampleState s;
        s.cfg = design(DesignKind::LinkTrace);
        s.cfg.target_size = 50;
        for (int i = 0; i < 50; ++i) s.add_member(static_cast<NodeId>(i), 0);
        Rng rng(45);
        REQUIRE(removal_step(s, 1, rng).empty());
    }
    SECTION("sample size settles around the target under heavy inflow") {
        Population pop = make_nodes(400);
        SampleState s;
        s.cfg = design(DesignKind::Bernoulli);
        s.cfg.p = 0.2; // ~80 offered per step
        s.cfg.target_size = 100;
        Rng rng(46);
        double total = 0.0;
        int measured = 0;
        for (Step t = 1; t <= 400; ++t) {
            step_design(s, pop, t, rng);
            if (t > 100) {
                total += static_cast<double>(s.members.size());
                ++measured;
            }
        }
        REQUIRE(total / measured == Catch::Approx(100.0).epsilon(0.10));
    }
    SECTION("per-node removal grows with time in sample") {
        Population pop = make_nodes(2);
        SampleState s;
        s.cfg = design(DesignKind::LinkTrace);
        s.cfg.removal.kind = RemovalRule::Kind::PerNode;
        s.cfg.removal.base_q = 0.0;
        s.cfg.removal.time_in_sample_factor = 0.5;
        s.add_member(0, 0);
        Rng rng(47);
        int stayed = 0;
        for (int k = 0; k < 1000; ++k) {
            SampleState trial = s;
            removal_step(trial, 1, rng); // q = 0.5 after one day
            stayed += trial.contains(0) ? 1 : 0;
        }
        REQUIRE(stayed == Catch::Approx(500).margin(60));
        SampleState sure = s;
        removal_step(sure, 2, rng); // q = 1 after two days
        REQUIRE_FALSE(sure.contains(0));
    }
}

TEST_CASE("random walk stationary distribution", "[sampling]") {
    auto run_walk = [](Population& pop, double jump_p, int steps, std::uint64_t seed) {
        SampleState s;
        s.cfg = design(DesignKind::RandomWalk);
        s.cfg.jump_p = jump_p;
        Rng rng(seed);
        s.add_member(pop.nodes[0].id, 0);
        std::map<NodeId, std::int64_t> visits;
        for (int t = 1; t <= steps; ++t) {
            random_walk_step(s, pop, t, rng);
            ++visits[s.members.begin()->first];
        }
        return visits;
    };

    SECTION("triangle: uniform visits") {
        Population pop = make_nodes(3);
        pop.add_edge(0, 1, 0);
        pop.add_edge(1, 2, 0);
        pop.add_edge(0, 2, 0);
        const auto visits = run_walk(pop, 0.0, 1000000, 48);
        for (const auto& [id, count] : visits)
            REQUIRE(count / 1e6 == Catch::Approx(1.0 / 3.0).epsilon(0.02));
    }
    SECTION("path a-b-c: visits proportional to degree (1,2,1)") {
        Population pop = make_nodes(3);
        pop.add_edge(0, 1, 0);
        pop.add_edge(1, 2, 0);
        const auto visits = run_walk(pop, 0.0, 1000000, 49);
        REQUIRE(visits.at(0) / 1e6 == Catch::Approx(0.25).epsilon(0.02));
        REQUIRE(visits.at(1) / 1e6 == Catch::Approx(0.50).epsilon(0.02));
        REQUIRE(visits.at(2) / 1e6 == Catch::Approx(0.25).epsilon(0.02));
    }
    SECTION("jump_p = 1: uniform over the other N-1 nodes") {
        Population pop = make_nodes(5);
        pop.add_edge(0, 1, 0); // links must not matter
        SampleState s;
        s.cfg = design(DesignKind::RandomWalk);
        s.cfg.jump_p = 1.0;
        s.add_member(0, 0);
        Rng rng(50);
        std::map<NodeId, int> firsts;
        for (int k = 0; k < 40000; ++k) {
            SampleState trial = s;
            random_walk_step(trial, pop, 1, rng);
            ++firsts[trial.members.begin()->first];
        }
        REQUIRE(firsts.count(0) == 0);
        for (const auto& [id, count] : firsts)
            REQUIRE(count / 40000.0 == Catch::Approx(0.25).epsilon(0.05));
    }
    SECTION("isolated node escalates to the rescue jump") {
        Population pop = make_nodes(3); // no edges at all
        SampleState s;
        s.cfg = design(DesignKind::RandomWalk);
        s.cfg.jump_p = 0.0;
        s.cfg.rescue_jump_p = 1.0;
        s.add_member(0, 0);
        Rng rng(51);
        random_walk_step(s, pop, 1, rng);
        REQUIRE_FALSE(s.contains(0));
    }
    SECTION("walker death restarts the walk; empty population suspends it") {
        Population pop = make_nodes(3);
        SampleState s;
        s.cfg = design(DesignKind::RandomWalk);
        s.add_member(1, 0);
        purge_dead(s, {1}, 1);
        REQUIRE(s.members.empty());
        Rng rng(52);
        random_walk_step(s, pop, 2, rng);
        REQUIRE(s.members.size() == 1);

        Population empty;
        SampleState idle;
        idle.cfg = design(DesignKind::RandomWalk);
        random_walk_step(idle, empty, 3, rng);
        REQUIRE(idle.members.empty());
    }
}

TEST_CASE("coupon recruitment", "[sampling]") {
    SECTION("k = 0 never grows") {
        Population pop = star_graph(4);
        SampleState s;
        s.cfg = design(DesignKind::Rds);
        s.cfg.coupons = 0;
        s.add_member(0, 0, 0);
        Rng rng(53);
        for (int t = 1; t <= 10; ++t) REQUIRE(rds_coupon_step(s, pop, t, rng).empty());
        REQUIRE(s.members.size() == 1);
    }
    SECTION("hub with three unsampled neighbors and five coupons") {
        Population pop = star_graph(3);
        SampleState s;
        s.cfg = design(DesignKind::Rds);
        s.cfg.coupons = 5;
        s.add_member(0, 0, 5);
        Rng rng(54);
        const auto added = rds_coupon_step(s, pop, 1, rng);
        REQUIRE(added.size() == 3);
        REQUIRE(s.members.at(0).coupons_left == 2);
        for (NodeId id : added) REQUIRE(s.members.at(id).coupons_left == 5);
    }
    SECTION("k = 1 on a path grows by at most one per member per step") {
        Population pop = make_nodes(6);
        for (int i = 0; i + 1 < 6; ++i)
            pop.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(i + 1), 0);
        SampleState s;
        s.cfg = design(DesignKind::Rds);
        s.cfg.coupons = 1;
        s.add_member(0, 0, 1);
        Rng rng(55);
        std::size_t prev = 1;
        for (int t = 1; t <= 10; ++t) {
            const auto added = rds_coupon_step(s, pop, t, rng);
            REQUIRE(added.size() <= prev);
            prev = s.members.size();
        }
        REQUIRE(s.members.size() == 6);
    }
}

TEST_CASE("strict without-replacement never re-admits", "[sampling]") {
    Population pop = make_nodes(30);
    SampleState s;
    s.cfg = design(DesignKind::Bernoulli);
    s.cfg.p = 0.3;
    s.cfg.replacement = 0.0; // r = 0
    s.cfg.target_size = 5;   // heavy churn
    Rng rng(56);
    std::set<NodeId> ever;
    for (Step t = 1; t <= 300; ++t) {
        const auto ev = step_design(s, pop, t, rng);
        for (NodeId id : ev.added) {
            REQUIRE(ever.count(id) == 0);
            ever.insert(id);
        }
    }
    REQUIRE(ever.size() == 30); // everyone eventually passed through once
}

TEST_CASE("samples never hold deleted nodes", "[sampling]") {
    Population pop = make_nodes(10);
    SampleState s;
    s.cfg = design(DesignKind::LinkTrace);
    for (int i = 0; i < 10; ++i) s.add_member(static_cast<NodeId>(i), 0);
    const std::vector<NodeId> dead = {2, 5, 7};
    pop.remove_nodes(dead);
    purge_dead(s, dead, 3);
    for (NodeId id : dead) REQUIRE_FALSE(s.contains(id));
    REQUIRE(s.members.size() == 7);
    REQUIRE(s.past.at(5).last_removed == 3);
}

TEST_CASE("fixed-n link tracing fills shortfalls from outside", "[sampling]") {
    Population pop = star_graph(2); // hub 0, leaves 1..2, plus two isolates
    pop.add_node(Node{});
    pop.add_node(Node{});
    SampleState s;
    s.cfg = design(DesignKind::LinkTraceFixedN);
    s.cfg.n_links = 4; // two links out exist, so two fill-ins
    s.add_member(0, 0);
    Rng rng(57);
    const auto added = link_trace_fixed_n_additions(s, pop, 1, rng);
    REQUIRE(added.size() == 4);
    REQUIRE(s.members.size() == 5);
}
