#pragma once

#include <string>
#include <vector>

#include "driftnet/config.hpp"
#include "driftnet/epidemic.hpp"
#include "driftnet/population.hpp"
#include "driftnet/rng.hpp"
#include "driftnet/sampling.hpp"

namespace driftnet {

// Standard tests miss early-stage infections.
inline bool hiv_test(const Node& n) {
    return n.infection.has_value() && n.infection->detectable();
}

/// i.i.d. adoption flags; the assortativity tilt is applied at link formation.
inline std::int64_t assign_adopters(Population& pop, double fraction, Rng& rng) {
    std::int64_t count = 0;
    for (auto& n : pop.nodes) {
        n.adopter = rng.bernoulli(fraction);
        count += n.adopter ? 1 : 0;
    }
    return count;
}

/// Clears the infection and grants resistance max(current, rho); rho = 0 is
/// the reinfectable cure, rho = 1 the immunizing one.  Returns false (no-op)
/// for an uninfected node.
inline bool apply_cure(Node& n, double resistance) {
    if (!n.infection) return false;
    n.infection.reset();
    n.resistance = std::max(n.resistance, resistance);
    return true;
}

inline bool apply_treatment(Node& n) {
    if (!n.infection || n.infection->treated) return false;
    n.infection->treated = true;
    return true;
}

inline bool apply_vaccine(Node& n, double resistance) {
    if (n.infection) return false;
    n.resistance = std::max(n.resistance, resistance);
    return true;
}

/** Protocol update for one pair-strategy edge at age = duration: both
 * partners take the home test, once; safer sex stays on afterwards only for
 * discordant results.  Concordant pairs (both negative, or both positive)
 * lift the restriction.  Returns true when the tests were taken this call.
 */
inline bool pair_strategy_update(EdgeState& st, const Node& endpoint_a,
                                 const Node& endpoint_b, Step t, int duration_days) {
    if (!st.pair.active) return false;
    if (st.pair.tested) return false;
    if (t - st.formed_at < duration_days) return false;
    st.pair.tested = true;
    st.pair.result_a = hiv_test(endpoint_a);
    st.pair.result_b = hiv_test(endpoint_b);
    st.pair.safer_sex = st.pair.result_a != st.pair.result_b;
    return true;
}

/// Decide whether a newly formed edge runs the protocol.  Under PrimaryOnly
/// cooperation a partner who already has other relationships does not extend
/// the strategy to the new one.
inline void activate_pair_protocol(EdgeState& st, const Node& a, const Node& b,
                                   InterventionConfig::Cooperation coop) {
    if (!(a.adopter && b.adopter)) return;
    if (coop == InterventionConfig::Cooperation::PrimaryOnly &&
        (a.degree() > 1 || b.degree() > 1))
        return;
    st.pair.active = true;
    st.pair.safer_sex = true; // from formation until the tests
}

struct InterventionTally {
    std::int64_t tests = 0;
    std::int64_t cures = 0;
    std::int64_t cure_noops = 0;
    std::int64_t treatments = 0;
    std::int64_t treatment_noops = 0;
    std::int64_t vaccinations = 0;
    std::int64_t vaccination_noops = 0;
    std::int64_t pair_tests = 0;
};

/** Test-and-act on a design's untested members: positives receive the
 * configured action; a vaccine goes to test-negative members who are truly
 * uninfected (an early-stage infection slips through the test and is logged
 * as a no-op).
 */
inline void apply_to_new_members(const InterventionConfig& iv, SampleState& s,
                                 Population& pop, Step t, InterventionTally& tally,
                                 std::vector<std::string>* event_log) {
    auto note = [&](const std::string& line) {
        if (event_log) event_log->push_back("t=" + std::to_string(t) + " " + line);
    };
    for (auto& [id, info] : s.members) {
        if (info.test != TestStatus::Untested) continue;
        Node* n = pop.find(id);
        if (!n) continue;
        const bool positive = hiv_test(*n);
        info.test = positive ? TestStatus::Positive : TestStatus::Negative;
        ++tally.tests;

        const bool cure_action =
            iv.kind == InterventionKind::Cure ||
            (iv.kind == InterventionKind::SeekAndTreat &&
             iv.action == InterventionConfig::Action::Cure);
        const bool treat_action =
            iv.kind == InterventionKind::Treatment ||
            (iv.kind == InterventionKind::SeekAndTreat &&
             iv.action == InterventionConfig::Action::Treatment);

        if (positive && cure_action) {
            if (apply_cure(*n, iv.resistance)) {
                ++tally.cures;
            } else {
                ++tally.cure_noops;
                note("cure no-op on node " + std::to_string(id));
            }
        } else if (positive && treat_action) {
            if (apply_treatment(*n)) {
                ++tally.treatments;
            } else {
                ++tally.treatment_noops;
                note("treatment no-op on node " + std::to_string(id));
            }
        } else if (!positive && iv.kind == InterventionKind::Vaccine) {
            if (apply_vaccine(*n, iv.resistance)) {
                ++tally.vaccinations;
            } else {
                ++tally.vaccination_noops;
                note("vaccine no-op on infected node " + std::to_string(id));
            }
        }
    }
}

/// Link-tracing probability hook for seek-and-treat: links out of a member
/// who tested positive are followed with a boosted probability.
inline LinkProbFn seek_and_treat_p_fn(const InterventionConfig& iv,
                                      const SampleState& s) {
    const double base = iv.design ? iv.design->follow_p : 0.0;
    const double boosted = clamp01(base * iv.positive_boost);
    return [&s, base, boosted](const Node& origin, const Node&, const EdgeState&) {
        auto it = s.members.find(origin.id);
        if (it != s.members.end() && it->second.test == TestStatus::Positive)
            return boosted;
        return base;
    };
}

/// Removal hook for seek-and-treat: test-negative members churn out faster.
inline std::function<double(NodeId, const MemberInfo&)>
seek_and_treat_extra_q(const InterventionConfig& iv) {
    const double q = iv.negative_removal_q;
    return [q](NodeId, const MemberInfo& info) {
        return info.test == TestStatus::Negative ? q : 0.0;
    };
}

} // namespace driftnet
