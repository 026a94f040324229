#include <catch2/catch_amalgamated.hpp>

#include "driftnet/engine.hpp"
#include "driftnet/interventions.hpp"

using namespace driftnet;

namespace {

Node chronic_case(double chronic_rate = 0.008) {
    Node n;
    Infection inf;
    inf.strain = Strain::from_factor(chronic_rate, 15.0, 0, 1);
    inf.stage = Stage::Chronic;
    n.infection = inf;
    n.first_infected_at = 0;
    return n;
}

Node early_case() {
    Node n = chronic_case();
    n.infection->stage = Stage::Early;
    return n;
}

} // namespace

TEST_CASE("adopter assignment", "[interventions]") {
    Population pop;
    for (int i = 0; i < 10000; ++i) pop.add_node(Node{});
    Rng rng(71);
    REQUIRE(assign_adopters(pop, 0.0, rng) == 0);
    const std::int64_t count = assign_adopters(pop, 0.5, rng);
    const double se = std::sqrt(10000 * 0.25);
    REQUIRE(std::abs(static_cast<double>(count) - 5000.0) < 3.0 * se);
}

TEST_CASE("assortative adoption tilts formation toward concordant pairs",
          "[interventions]") {
    auto concordant_fraction = [](double w, std::uint64_t seed) {
        Rng rng(seed);
        NetworkConfig nc;
        nc.amplitude = 0.2;
        nc.spread = 0.1;
        nc.opposite_sex_only = false;
        nc.edge_end_hazard_per_day = 1.0;  // clear every step
        Population pop;
        for (int i = 0; i < 200; ++i) {
            Node n;
            n.pos = {rng.uniform() * 0.2, rng.uniform() * 0.2};
            n.amplitude = nc.amplitude;
            n.spread = nc.spread;
            n.adopter = i % 2 == 0;
            pop.add_node(n);
        }
        std::int64_t concordant = 0, total = 0;
        for (Step t = 1; total < 1000; ++t) {
            const EdgeEvents ev = form_and_dissolve_links(pop, nc, t, rng, w, true);
            for (const EdgeKey& key : ev.formed) {
                total += 1;
                if (pop.at(key.a).adopter == pop.at(key.b).adopter) ++concordant;
            }
        }
        return static_cast<double>(concordant) / static_cast<double>(total);
    };
    const double mixed = concordant_fraction(0.0, 72);
    const double tilted = concordant_fraction(9.0, 72);
    REQUIRE(tilted > mixed);
    REQUIRE(mixed == Catch::Approx(0.5).margin(0.08));
}

TEST_CASE("HIV test sees chronic infections only", "[interventions]") {
    Node clean;
    REQUIRE_FALSE(hiv_test(clean));
    REQUIRE_FALSE(hiv_test(early_case()));
    REQUIRE(hiv_test(chronic_case()));
}

TEST_CASE("cure variants", "[interventions]") {
    SECTION("immunizing cure blocks all future exposure") {
        Node n = chronic_case();
        REQUIRE(apply_cure(n, 1.0));
        REQUIRE_FALSE(n.infection.has_value());
        REQUIRE(n.resistance == 1.0);
        EpidemicConfig ec;
        EdgeState edge;
        const Node source = chronic_case(0.9);
        REQUIRE(per_contact_transmission_prob(source, n, edge, ec, 1.0) == 0.0);
    }
    SECTION("reinfectable cure leaves susceptibility intact") {
        Node n = chronic_case();
        REQUIRE(apply_cure(n, 0.0));
        REQUIRE(n.resistance == 0.0);
        EpidemicConfig ec;
        EdgeState edge;
        const Node source = chronic_case(0.9);
        REQUIRE(per_contact_transmission_prob(source, n, edge, ec, 1.0) ==
                Catch::Approx(0.9));
    }
    SECTION("intermediate resistance damps exposure") {
        Node n = chronic_case();
        apply_cure(n, 0.6);
        EpidemicConfig ec;
        EdgeState edge;
        const Node source = chronic_case(0.01);
        REQUIRE(per_contact_transmission_prob(source, n, edge, ec, 1.0) ==
                Catch::Approx(0.004).epsilon(1e-12));
    }
    SECTION("curing an uninfected node is a no-op") {
        Node n;
        REQUIRE_FALSE(apply_cure(n, 1.0));
        REQUIRE(n.resistance == 0.0);
    }
    SECTION("cure changes exactly one node's values") {
        Population pop;
        pop.add_node(chronic_case());
        pop.add_node(chronic_case());
        pop.add_node(Node{});
        const Node before = pop.nodes[1];
        const std::int64_t prevalence = pop.infected_count();
        apply_cure(pop.nodes[0], 1.0);
        REQUIRE(pop.infected_count() == prevalence - 1);
        REQUIRE(pop.nodes[1].infection->stage == before.infection->stage);
        REQUIRE(pop.nodes[1].resistance == before.resistance);
        REQUIRE(pop.nodes[2].resistance == 0.0);
    }
}

TEST_CASE("treatment and vaccine", "[interventions]") {
    SECTION("treatment multipliers apply while flagged") {
        Node n = chronic_case();
        REQUIRE(apply_treatment(n));
        EpidemicConfig ec;
        EdgeState edge;
        Node sus;
        REQUIRE(per_contact_transmission_prob(n, sus, edge, ec, 1.0) ==
                Catch::Approx(0.008 * 0.05).epsilon(1e-12));
        REQUIRE_FALSE(apply_treatment(n)); // already treated
    }
    SECTION("vaccine grants resistance to the uninfected only") {
        Node n;
        REQUIRE(apply_vaccine(n, 1.0));
        REQUIRE(n.resistance == 1.0);
        Node sick = chronic_case();
        REQUIRE_FALSE(apply_vaccine(sick, 1.0));
        REQUIRE(sick.resistance == 0.0);
    }
    SECTION("treating the uninfected is a no-op") {
        Node n;
        REQUIRE_FALSE(apply_treatment(n));
    }
}

TEST_CASE("pair protocol activation", "[interventions]") {
    Node a, b;
    a.adopter = b.adopter = true;
    EdgeState st;
    SECTION("both adopters activate, mixed pairs never do") {
        activate_pair_protocol(st, a, b, InterventionConfig::Cooperation::Full);
        REQUIRE(st.pair.active);
        REQUIRE(st.pair.safer_sex);
        EdgeState st2;
        Node c; // non-adopter
        activate_pair_protocol(st2, a, c, InterventionConfig::Cooperation::Full);
        REQUIRE_FALSE(st2.pair.active);
    }
    SECTION("primary-only cooperation skips concurrent partnerships") {
        a.neighbors = {1, 2}; // degree 2 after this edge formed
        b.neighbors = {0};
        EdgeState st3;
        activate_pair_protocol(st3, a, b, InterventionConfig::Cooperation::PrimaryOnly);
        REQUIRE_FALSE(st3.pair.active);
        a.neighbors = {1};
        EdgeState st4;
        activate_pair_protocol(st4, a, b, InterventionConfig::Cooperation::PrimaryOnly);
        REQUIRE(st4.pair.active);
    }
}

TEST_CASE("pair protocol testing rules", "[interventions]") {
    const int duration = 84;
    EdgeState st;
    st.formed_at = 0;
    st.pair.active = true;
    st.pair.safer_sex = true;

    SECTION("safer sex holds through the first 84 days") {
        Node a, b;
        for (Step t = 1; t < duration; ++t) {
            REQUIRE_FALSE(pair_strategy_update(st, a, b, t, duration));
            REQUIRE(st.pair.safer_sex);
        }
    }
    SECTION("both negative lifts the restriction") {
        Node a, b;
        REQUIRE(pair_strategy_update(st, a, b, duration, duration));
        REQUIRE(st.pair.tested);
        REQUIRE_FALSE(st.pair.safer_sex);
    }
    SECTION("both positive also lifts it") {
        Node a = chronic_case(), b = chronic_case();
        pair_strategy_update(st, a, b, duration, duration);
        REQUIRE_FALSE(st.pair.safer_sex);
    }
    SECTION("discordant results keep safer sex for the edge's lifetime") {
        Node a = chronic_case(), b;
        pair_strategy_update(st, a, b, duration, duration);
        REQUIRE(st.pair.safer_sex);
        // tests are taken once; later updates never lift the flag
        for (Step t = duration + 1; t < duration + 400; ++t) {
            REQUIRE_FALSE(pair_strategy_update(st, a, b, t, duration));
            REQUIRE(st.pair.safer_sex);
        }
    }
    SECTION("early-stage infection slips through the window test") {
        Node a = early_case(), b;
        pair_strategy_update(st, a, b, duration, duration);
        REQUIRE_FALSE(st.pair.safer_sex); // both read negative
    }
}

TEST_CASE("protocol window invariant under full adoption", "[interventions]") {
    SimConfig cfg;
    cfg.k_groups = 4;
    cfg.n_target = 200;
    cfg.horizon = 250;
    cfg.rng_seed = 73;
    cfg.network.amplitude = 0.08;
    cfg.network.spread = 0.08;
    cfg.epidemic.enabled = true;
    cfg.epidemic.strains = {{0.008, 15.0, 10, false, 0.0, 0.0}};
    InterventionConfig pair;
    pair.kind = InterventionKind::PairSaferSexTest;
    pair.adoption_fraction = 1.0;
    cfg.interventions = {pair};

    SimState s = init_simulation(cfg);
    std::int64_t young_edges_checked = 0;
    while (s.t < cfg.horizon) {
        step_simulation(s);
        for (const auto& [key, st] : s.pop.edges) {
            if (s.t - st.formed_at < pair.duration_days) {
                REQUIRE(st.pair.active);
                REQUIRE(st.pair.safer_sex);
                ++young_edges_checked;
            }
        }
    }
    REQUIRE(young_edges_checked > 1000);
}

TEST_CASE("seek and treat traces the partners of positives", "[interventions]") {
    SECTION("a sure follow probability pulls in all partners next step") {
        Population pop;
        pop.add_node(chronic_case());
        for (int i = 0; i < 3; ++i) pop.add_node(Node{});
        pop.add_node(Node{}); // unlinked bystander
        for (int i = 1; i <= 3; ++i) pop.add_edge(0, static_cast<NodeId>(i), 0);

        InterventionConfig iv;
        iv.kind = InterventionKind::SeekAndTreat;
        iv.action = InterventionConfig::Action::Treatment;
        iv.positive_boost = 1.0;
        DesignConfig d;
        d.name = "seek";
        d.kind = DesignKind::LinkTrace;
        d.follow_p = 1.0;
        iv.design = d;

        SampleState s;
        s.cfg = d;
        s.add_member(0, 0);
        s.members.at(0).test = TestStatus::Positive;

        Rng rng(74);
        const auto ev = step_design(s, pop, 1, rng, seek_and_treat_p_fn(iv, s),
                                    seek_and_treat_extra_q(iv));
        REQUIRE(ev.added == std::vector<NodeId>{1, 2, 3});
        REQUIRE_FALSE(s.contains(4));
    }
    SECTION("negatives churn out with the elevated removal probability") {
        InterventionConfig iv;
        iv.kind = InterventionKind::SeekAndTreat;
        iv.negative_removal_q = 1.0;
        const auto extra = seek_and_treat_extra_q(iv);
        MemberInfo neg;
        neg.test = TestStatus::Negative;
        MemberInfo pos;
        pos.test = TestStatus::Positive;
        REQUIRE(extra(0, neg) == 1.0);
        REQUIRE(extra(0, pos) == 0.0);
    }
}

TEST_CASE("full-coverage cure wipes out a frozen epidemic", "[interventions]") {
    SimConfig cfg;
    cfg.k_groups = 1;
    cfg.n_target = 60;
    cfg.horizon = 400;
    cfg.rng_seed = 75;
    cfg.demography.mortality_per_year = 0.0;
    cfg.network.amplitude = 0.0; // frozen graph: no formation
    cfg.network.edge_end_hazard_per_day = 0.0;
    cfg.epidemic.enabled = true;
    cfg.epidemic.early_mean_days = 2.0; // quickly detectable, so coverage is real
    cfg.epidemic.strains = {{0.008, 1.0, 12, false, 0.0, 0.0}};

    SimState s = init_simulation(cfg);
    // hand-build a frozen partnership ring so the virus has somewhere to go
    for (std::size_t i = 0; i < s.pop.size(); ++i)
        s.pop.add_edge(s.pop.nodes[i].id, s.pop.nodes[(i + 1) % s.pop.size()].id, 0);

    std::int64_t prev = s.pop.infected_count();
    std::int64_t cured = 0;
    while (s.t < cfg.horizon) {
        step_simulation(s);
        for (auto& n : s.pop.nodes) // full coverage: cure every positive, daily
            if (hiv_test(n) && apply_cure(n, 1.0)) ++cured;
        const std::int64_t now = s.pop.infected_count();
        if (s.t > 10) REQUIRE(now <= prev); // every seed swept by then
        prev = now;
    }
    REQUIRE(s.pop.infected_count() == 0);
    REQUIRE(cured >= 12);
}
