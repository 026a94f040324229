#pragma once

#include <map>
#include <vector>

#include "driftnet/config.hpp"
#include "driftnet/hazards.hpp"
#include "driftnet/population.hpp"
#include "driftnet/rng.hpp"
#include "driftnet/sampling.hpp"

namespace driftnet {

/** Per-contact transmission probability across one partnership link.
 *
 * Stage rate of the infected host's strain, times the GUD cofactor when
 * either partner carries it, the safer-sex multiplier while the edge's flag
 * is active, the treatment multiplier for a treated host, and the exposed
 * partner's remaining susceptibility 1 - rho.
 */
inline double per_contact_transmission_prob(const Node& infected_host,
                                            const Node& susceptible,
                                            const EdgeState& edge,
                                            const EpidemicConfig& ec,
                                            double safer_sex_multiplier) {
    if (!infected_host.infection || susceptible.infection) return 0.0;
    double p = infected_host.infection->stage_rate(ec.late_stage.factor);
    if (infected_host.gud || susceptible.gud) p *= ec.gud_multiplier;
    if (edge.pair.safer_sex) p *= safer_sex_multiplier;
    if (infected_host.infection->treated) p *= ec.treatment_transmission_multiplier;
    p *= 1.0 - susceptible.resistance;
    return clamp01(p);
}

/// Child strain on transmission: the early rate moves by a small random
/// increment, clamped to [0,1]; the chronic rate and family are inherited.
inline Strain mutate_on_transmission(const Strain& parent, const EvolutionConfig& ev,
                                     Rng& rng, std::uint64_t& serial_counter) {
    if (!ev.enabled) return parent;
    const double eps = ev.increment == EvolutionConfig::Increment::Uniform
                           ? rng.uniform(-ev.delta, ev.delta)
                           : rng.normal(0.0, ev.delta / 2.0);
    Strain child = parent;
    child.early_rate = clamp01(parent.early_rate + eps);
    child.serial = ++serial_counter;
    return child;
}

inline std::int64_t draw_early_duration(const EpidemicConfig& ec, Rng& rng) {
    return rng.geometric(1.0 / ec.early_mean_days);
}

struct TransmitEvents {
    std::int64_t contacts = 0;
    std::vector<NodeId> infected;
};

/** One day of viral link tracing: on each serodiscordant partnership a
 * contact occurs with the pair's daily contact probability, and on contact
 * the virus traces the link with the per-contact transmission probability.
 * A node acquires at most one infection per day (without replacement); new
 * infections start in the early stage and become infectious the next day.
 */
inline TransmitEvents contact_and_transmit_step(Population& pop,
                                                const EpidemicConfig& ec, Step t,
                                                Rng& rng, double safer_sex_multiplier,
                                                std::uint64_t& serial_counter) {
    TransmitEvents ev;
    std::map<NodeId, Infection> staged;
    for (const auto& [key, st] : pop.edges) {
        const Node& a = pop.at(key.a);
        const Node& b = pop.at(key.b);
        const bool a_inf = a.infected() && !staged.count(a.id);
        const bool b_inf = b.infected() && !staged.count(b.id);
        if (a_inf == b_inf) continue;
        const Node& src = a_inf ? a : b;
        const Node& dst = a_inf ? b : a;
        if (dst.infected() || staged.count(dst.id)) continue;
        const double c = 0.5 * (a.contact_prob + b.contact_prob);
        if (!rng.bernoulli(c)) continue;
        ++ev.contacts;
        const double p =
            per_contact_transmission_prob(src, dst, st, ec, safer_sex_multiplier);
        if (!rng.bernoulli(p)) continue;
        Infection inf;
        inf.strain = mutate_on_transmission(src.infection->strain, ec.evolution, rng,
                                            serial_counter);
        inf.stage = Stage::Early;
        inf.infected_at = t;
        inf.early_duration = draw_early_duration(ec, rng);
        staged.emplace(dst.id, inf);
    }
    for (auto& [id, inf] : staged) {
        Node& n = pop.at(id);
        n.infection = inf;
        if (n.first_infected_at < 0) n.first_infected_at = t;
        ev.infected.push_back(id);
    }
    return ev;
}

struct StageEvents {
    std::int64_t to_chronic = 0;
    std::int64_t to_late = 0;
};

/// Early -> Chronic once the drawn duration has elapsed (or by Weibull hazard
/// under that model); Chronic -> Late only when the late stage is enabled.
inline StageEvents progress_stages(Population& pop, const EpidemicConfig& ec, Step t,
                                   Rng& rng) {
    StageEvents ev;
    for (auto& n : pop.nodes) {
        if (!n.infection) continue;
        Infection& inf = *n.infection;
        if (inf.stage == Stage::Early) {
            const auto age = static_cast<double>(t - inf.infected_at);
            bool progress = false;
            if (ec.early_model == EpidemicConfig::EarlyModel::Geometric)
                progress = t - inf.infected_at >= inf.early_duration;
            else
                progress = rng.bernoulli(
                    weibull_hazard(age, 1.0 / ec.early_mean_days, ec.weibull_shape));
            if (progress) {
                inf.stage = Stage::Chronic;
                inf.chronic_at = t;
                if (ec.late_stage.enabled)
                    inf.chronic_duration =
                        rng.geometric(1.0 / ec.late_stage.chronic_mean_days);
                ++ev.to_chronic;
            }
        } else if (inf.stage == Stage::Chronic && ec.late_stage.enabled) {
            if (t - inf.chronic_at >= inf.chronic_duration) {
                inf.stage = Stage::Late;
                ++ev.to_late;
            }
        }
    }
    return ev;
}

/// Excess daily mortality from the tradeoff, evaluated at the current stage's
/// transmission rate; treatment scales it down.
inline double disease_hazard(const Node& n, const EpidemicConfig& ec,
                             const TradeoffParams& tradeoff) {
    if (!n.infection) return 0.0;
    double alpha = tradeoff.virulence(n.infection->stage_rate(ec.late_stage.factor));
    if (n.infection->treated) alpha *= ec.treatment_mortality_multiplier;
    return alpha;
}

/// Infect the configured seed hosts, drawn without replacement per strain block.
inline std::vector<NodeId> seed_infections(Population& pop, const EpidemicConfig& ec,
                                           Step t, Rng& rng,
                                           std::uint64_t& serial_counter) {
    std::vector<NodeId> seeded;
    for (std::size_t f = 0; f < ec.strains.size(); ++f) {
        const StrainConfig& sc = ec.strains[f];
        std::vector<NodeId> pool;
        for (const auto& n : pop.nodes)
            if (!n.infected()) pool.push_back(n.id);
        const auto want = static_cast<std::size_t>(sc.seed_count);
        const std::size_t take = std::min(want, pool.size());
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + rng.uniform_int(pool.size() - i);
            std::swap(pool[i], pool[j]);
        }
        std::vector<NodeId> chosen(pool.begin(), pool.begin() + take);
        std::sort(chosen.begin(), chosen.end());
        for (NodeId id : chosen) {
            const double factor = sc.random_factor
                                      ? rng.uniform(sc.factor_min, sc.factor_max)
                                      : sc.early_factor;
            Node& n = pop.at(id);
            Infection inf;
            inf.strain = Strain::from_factor(sc.chronic_rate, factor,
                                             static_cast<int>(f), ++serial_counter);
            inf.stage = Stage::Early;
            inf.infected_at = t;
            inf.early_duration = draw_early_duration(ec, rng);
            n.infection = inf;
            n.first_infected_at = t;
            seeded.push_back(id);
        }
    }
    return seeded;
}

} // namespace driftnet
