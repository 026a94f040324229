#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "driftnet/config.hpp"
#include "driftnet/population.hpp"
#include "driftnet/rng.hpp"

namespace driftnet {

// Reflect a coordinate into [0,1]; handles overshoot of any size.
inline double reflect_unit(double x) {
    x = std::fmod(x, 2.0);
    if (x < 0.0) x += 2.0;
    return x > 1.0 ? 2.0 - x : x;
}

inline Vec2 reflect_unit(Vec2 v) { return {reflect_unit(v.x), reflect_unit(v.y)}; }

// Reflection with a bounce: the displacement component flips sign with each
// fold, so a cluster hitting the boundary reverses instead of sticking.
inline void reflect_bounce(double& x, double& v) {
    while (x < 0.0 || x > 1.0) {
        x = x < 0.0 ? -x : 2.0 - x;
        v = -v;
    }
}

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Euclidean distance between absolute node positions.
inline double distance(const Node& u, const Node& v) { return distance(u.pos, v.pos); }

// Group centers i.i.d. uniform on the unit square; the initial displacement
// is a draw from its stationary N(0, sigma_delta^2 I) distribution.
inline std::vector<Group> init_groups(int k, double sigma_delta, Rng& rng) {
    require(k >= 1, "k_groups", "must be >= 1");
    std::vector<Group> groups(k);
    for (int i = 0; i < k; ++i) {
        groups[i].id = i;
        groups[i].center = {rng.uniform(), rng.uniform()};
        groups[i].prev_displacement = {rng.normal(0.0, sigma_delta),
                                       rng.normal(0.0, sigma_delta)};
    }
    return groups;
}

// Metropolis-Hastings accept rule holding the displacement at its
// N(0, sigma_delta^2 I) target: accept with min(1, f(proposal)/f(current)).
inline bool mh_accept_displacement(const Vec2& current, const Vec2& proposal,
                                   double sigma_delta, Rng& rng) {
    if (sigma_delta <= 0.0) return true;
    const double log_ratio =
        (norm2(current) - norm2(proposal)) / (2.0 * sigma_delta * sigma_delta);
    return log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio);
}

/** One day of center drift with momentum.
 *
 * The displacement performs a random walk delta' = delta + eps,
 * eps ~ N(0, sigma_eps^2 I), held at its N(0, sigma_delta^2 I) stationary
 * distribution by a Metropolis-Hastings accept step.  The center moves by
 * the accepted displacement and reflects at the unit-square boundary.
 */
inline void step_group_center(Group& g, double sigma_delta, double sigma_eps, Rng& rng) {
    if (sigma_eps > 0.0) {
        const Vec2 proposal{g.prev_displacement.x + rng.normal(0.0, sigma_eps),
                            g.prev_displacement.y + rng.normal(0.0, sigma_eps)};
        if (mh_accept_displacement(g.prev_displacement, proposal, sigma_delta, rng))
            g.prev_displacement = proposal;
    }
    g.center = g.center + g.prev_displacement;
    reflect_bounce(g.center.x, g.prev_displacement.x);
    reflect_bounce(g.center.y, g.prev_displacement.y);
}

// Draw (offset_t, offset_{t-1}) from the stationary AR(2) joint so node motion
// starts in equilibrium: consecutive offsets correlate at rho1 = phi1/(1-phi2).
inline void init_offset(Node& n, const SpatialConfig& sc, Rng& rng) {
    const double sd = sc.sigma_offset;
    const double rho1 = sc.phi1 / (1.0 - sc.phi2);
    const double cond_sd = sd * std::sqrt(std::max(0.0, 1.0 - rho1 * rho1));
    n.offset = {rng.normal(0.0, sd), rng.normal(0.0, sd)};
    n.offset_prev = {rng.normal(rho1 * n.offset.x, cond_sd),
                     rng.normal(rho1 * n.offset.y, cond_sd)};
}

/// AR(2) update of a node's offset around its group center, innovation
/// variance chosen to keep the marginal at N(0, sigma_offset^2) per axis.
inline void step_node_offset(Node& n, const SpatialConfig& sc, Rng& rng) {
    const double eta_sd = sc.offset_innovation_sd();
    const Vec2 next{
        sc.phi1 * n.offset.x + sc.phi2 * n.offset_prev.x + rng.normal(0.0, eta_sd),
        sc.phi1 * n.offset.y + sc.phi2 * n.offset_prev.y + rng.normal(0.0, eta_sd)};
    n.offset_prev = n.offset;
    n.offset = next;
}

// Insertion weights: proportional to target size over current size, the
// current sizes being those at the start of the regulation step.
inline std::vector<double> insertion_weights(const std::vector<Group>& groups,
                                             const std::vector<std::int64_t>& current) {
    std::vector<double> w(groups.size(), 0.0);
    for (std::size_t g = 0; g < groups.size(); ++g)
        w[g] = groups[g].target_size /
               static_cast<double>(std::max<std::int64_t>(1, current[g]));
    return w;
}

inline std::vector<std::int64_t> group_counts(const Population& pop, std::size_t k) {
    std::vector<std::int64_t> c(k, 0);
    for (const auto& n : pop.nodes) ++c[static_cast<std::size_t>(n.group)];
    return c;
}

struct RegulationEvents {
    std::vector<NodeId> dead; // sorted
    std::int64_t deaths_background = 0;
    std::int64_t deaths_disease = 0;
    std::int64_t births = 0;
    std::int64_t edges_dropped = 0;
};

/** Demographic regulation: mortality first (background hazard plus any
 * disease surcharge), then Poisson insertions with mean
 * rho * max(0, n_target - N_t), each newcomer joining group g with
 * probability proportional to target_g / max(1, current_g).  Group weights
 * use the sizes at the start of the insertion phase.
 */
inline RegulationEvents
regulate_population(Population& pop, const std::vector<Group>& groups,
                    std::int64_t n_target, const DemographyConfig& dem, Step t, Rng& rng,
                    const std::function<double(const Node&)>& disease_hazard_fn,
                    const std::function<Node(int group)>& make_node_fn) {
    RegulationEvents ev;
    const double bg = dem.mortality_per_day;
    for (const auto& n : pop.nodes) {
        const double dis = disease_hazard_fn ? disease_hazard_fn(n) : 0.0;
        const double total = std::min(1.0, bg + dis);
        if (total <= 0.0) continue;
        const double u = rng.uniform();
        if (u >= total) continue;
        ev.dead.push_back(n.id);
        if (u < bg)
            ++ev.deaths_background;
        else
            ++ev.deaths_disease;
    }
    ev.edges_dropped = static_cast<std::int64_t>(pop.remove_nodes(ev.dead));

    const double deficit =
        static_cast<double>(n_target) - static_cast<double>(pop.size());
    const double mu = dem.insertion_responsiveness * std::max(0.0, deficit);
    ev.births = rng.poisson(mu);
    const auto weights = insertion_weights(groups, group_counts(pop, groups.size()));
    for (std::int64_t i = 0; i < ev.births; ++i) {
        std::size_t g = 0;
        if (weights.size() > 1) {
            double total_w = 0.0;
            for (double w : weights) total_w += w;
            if (total_w > 0.0) {
                const double u = rng.uniform() * total_w;
                double acc = 0.0;
                for (std::size_t k = 0; k < weights.size(); ++k) {
                    acc += weights[k];
                    if (u < acc) {
                        g = k;
                        break;
                    }
                    if (k + 1 == weights.size()) g = k;
                }
            }
        }
        pop.add_node(make_node_fn(static_cast<int>(g)));
    }
    return ev;
}

} // namespace driftnet
