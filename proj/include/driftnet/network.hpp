#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "driftnet/config.hpp"
#include "driftnet/population.hpp"
#include "driftnet/rng.hpp"
#include "driftnet/spatial.hpp"

namespace driftnet {

inline double kernel_reach(double spread, const NetworkConfig& nc) {
    return nc.reach_multiple * spread;
}

/** Probability that a node tentatively selects a partner at distance d.
 *
 * Normal kernel: a * exp(-d^2 / (2 sigma^2)), zero beyond the reach cutoff.
 * Logistic decays around sigma with the extra shape parameter; disk is flat
 * out to the cutoff.  All three share the reach_multiple * sigma cutoff.
 */
inline double tentative_selection_prob(double amplitude, double spread, double d,
                                       const NetworkConfig& nc) {
    if (amplitude <= 0.0 || d < 0.0 || d > kernel_reach(spread, nc)) return 0.0;
    switch (nc.kernel) {
    case KernelKind::Normal:
        return amplitude * std::exp(-d * d / (2.0 * spread * spread));
    case KernelKind::Logistic:
        return amplitude / (1.0 + std::exp((d - spread) / nc.logistic_shape));
    case KernelKind::Disk:
        return amplitude;
    }
    return 0.0;
}

inline double tentative_selection_prob(const Node& i, double d, const NetworkConfig& nc) {
    return tentative_selection_prob(i.amplitude, i.spread, d, nc);
}

inline double degree_modifier(int degree, const DegreePolicy& dp) {
    switch (dp.kind) {
    case DegreePolicyKind::None:
        return 1.0;
    case DegreePolicyKind::Compensatory:
        return degree >= dp.max_degree ? dp.residual : 1.0;
    case DegreePolicyKind::Preferential:
        return std::pow(1.0 + degree, dp.exponent) / dp.norm;
    }
    return 1.0;
}

/** Consensus formation probability for a candidate pair.
 *
 * Base is the product of the two one-sided kernels (for the normal kernel this
 * is h(d) = a_i a_j exp(-(d^2/2)(1/sigma_i^2 + 1/sigma_j^2))), then the sex
 * rule, both degree-policy factors, the shared-component modifier, and the
 * strategy-assortativity tilt, clamped to [0,1].  Degrees are passed in so the
 * caller can evaluate every pair against the same pre-step snapshot.
 */
inline double pair_formation_prob(const Node& u, const Node& v, double d, int deg_u,
                                  int deg_v, bool same_component,
                                  const NetworkConfig& nc, double assort_weight = 0.0,
                                  bool assort_active = false) {
    if (nc.opposite_sex_only && u.sex == v.sex) return 0.0;
    double base;
    if (nc.kernel == KernelKind::Normal) {
        // h(d) = a_u a_v exp(-(d^2/2)(1/s_u^2 + 1/s_v^2)), one exp per pair
        if (u.amplitude <= 0.0 || v.amplitude <= 0.0 || d < 0.0 ||
            d > kernel_reach(u.spread, nc) || d > kernel_reach(v.spread, nc))
            return 0.0;
        base = u.amplitude * v.amplitude *
               std::exp(-(d * d / 2.0) *
                        (1.0 / (u.spread * u.spread) + 1.0 / (v.spread * v.spread)));
    } else {
        base = tentative_selection_prob(u, d, nc) * tentative_selection_prob(v, d, nc);
    }
    if (base <= 0.0) return 0.0;
    // modifiers accumulate symmetrically so prob(u,v) == prob(v,u) exactly
    double mods =
        degree_modifier(deg_u, nc.degree_policy) * degree_modifier(deg_v, nc.degree_policy);
    if (same_component) mods *= nc.component_modifier;
    if (assort_active) {
        const bool concordant = u.adopter == v.adopter;
        mods *= concordant ? 1.0 + assort_weight : 1.0 / (1.0 + assort_weight);
    }
    return clamp01(base * mods);
}

// An edge ends when either endpoint ends it: 1 - (1-q_u)(1-q_v), unless the
// edge carries its own rate.
inline double edge_end_prob(const Node& u, const Node& v, const EdgeState& st) {
    if (st.end_hazard_override) return clamp01(*st.end_hazard_override);
    return 1.0 - (1.0 - u.end_hazard) * (1.0 - v.end_hazard);
}

// ------------------------------------------------------------------ components

// Component label per node index; the label is the smallest node id in the
// component, reported through the index of that node.
inline std::vector<std::size_t> component_roots(const Population& pop) {
    const std::size_t n = pop.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    std::unordered_map<NodeId, std::size_t> index;
    index.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) index.emplace(pop.nodes[i].id, i);

    auto root = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (const auto& [key, st] : pop.edges) {
        std::size_t ra = root(index.at(key.a));
        std::size_t rb = root(index.at(key.b));
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb); // keep smallest id
    }
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = root(i);
    return out;
}

/// Connected components with deterministic labels (smallest member id).
inline std::map<NodeId, std::pair<NodeId, std::int64_t>>
component_sizes(const Population& pop) {
    const auto roots = component_roots(pop);
    std::vector<std::int64_t> size(pop.size(), 0);
    for (std::size_t i = 0; i < pop.size(); ++i) ++size[roots[i]];
    std::map<NodeId, std::pair<NodeId, std::int64_t>> out;
    for (std::size_t i = 0; i < pop.size(); ++i)
        out[pop.nodes[i].id] = {pop.nodes[roots[i]].id, size[roots[i]]};
    return out;
}

// ------------------------------------------------------------------ spatial grid

/** Uniform grid over the unit square with cells of roughly half the largest
 * kernel reach.  Candidate enumeration visits every unordered pair at cell
 * distance compatible with the reach exactly once, in a deterministic cell
 * order, so callers can consume randomness per candidate.
 */
class NeighborGrid {
public:
    NeighborGrid(const Population& pop, const NetworkConfig& nc) {
        reach_ = 0.0;
        for (const auto& n : pop.nodes)
            reach_ = std::max(reach_, kernel_reach(n.spread, nc));
        const double want = reach_ > 0.0 ? reach_ / 2.0 : 1.0;
        dim_ = std::clamp<std::int64_t>(static_cast<std::int64_t>(1.0 / want), 1, 4096);
        cell_ = 1.0 / static_cast<double>(dim_);
        span_ = reach_ > 0.0
                    ? static_cast<std::int64_t>(std::ceil(reach_ / cell_ - 1e-12)) + 1
                    : 1;

        std::unordered_map<std::int64_t, std::size_t> slot;
        slot.reserve(pop.size() * 2);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const std::int64_t k = key(pop.nodes[i].pos);
            auto [it, fresh] = slot.try_emplace(k, cells_.size());
            if (fresh) cells_.push_back({k, {}});
            cells_[it->second].second.push_back(i);
        }
        std::sort(cells_.begin(), cells_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        slot_.reserve(cells_.size() * 2);
        for (std::size_t c = 0; c < cells_.size(); ++c) slot_.emplace(cells_[c].first, c);

        // forward cell offsets whose minimum possible distance is within reach
        for (std::int64_t dx = 0; dx <= span_; ++dx)
            for (std::int64_t dy = dx == 0 ? 1 : -span_; dy <= span_; ++dy) {
                const double gx = dx > 0 ? (dx - 1) * cell_ : 0.0;
                const double gy = std::abs(dy) > 0 ? (std::abs(dy) - 1) * cell_ : 0.0;
                if (gx * gx + gy * gy <= reach_ * reach_ + 1e-12)
                    forward_.emplace_back(dx, dy);
            }
    }

    // Visits each unordered candidate pair once: within-cell pairs in node
    // order, then pairs against forward neighbor cells, cells ascending.
    template <typename Fn>
    void for_each_pair(Fn&& fn) const {
        for (const auto& [k, members] : cells_) {
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b)
                    fn(members[a], members[b]);
            const std::int64_t cx = k / dim_, cy = k % dim_;
            for (const auto& [dx, dy] : forward_) {
                const std::int64_t x = cx + dx, y = cy + dy;
                if (x < 0 || y < 0 || x >= dim_ || y >= dim_) continue;
                const auto it = slot_.find(x * dim_ + y);
                if (it == slot_.end()) continue;
                for (std::size_t a : members)
                    for (std::size_t b : cells_[it->second].second)
                        fn(a, b);
            }
        }
    }

    // indices j > i within cell range of node i, ascending (test support)
    std::vector<std::size_t> candidates_after(const Population& pop, std::size_t i) const {
        std::vector<std::size_t> out;
        const std::int64_t k = key(pop.nodes[i].pos);
        const std::int64_t cx = k / dim_, cy = k % dim_;
        for (std::int64_t dx = -span_; dx <= span_; ++dx)
            for (std::int64_t dy = -span_; dy <= span_; ++dy) {
                const std::int64_t x = cx + dx, y = cy + dy;
                if (x < 0 || y < 0 || x >= dim_ || y >= dim_) continue;
                const auto it = slot_.find(x * dim_ + y);
                if (it == slot_.end()) continue;
                for (std::size_t j : cells_[it->second].second)
                    if (j > i) out.push_back(j);
            }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::int64_t key(const Vec2& p) const {
        auto clampi = [&](double v) {
            auto c = static_cast<std::int64_t>(v / cell_);
            return std::min(std::max<std::int64_t>(0, c), dim_ - 1);
        };
        return clampi(p.x) * dim_ + clampi(p.y);
    }

    double reach_ = 0.0;
    double cell_ = 1.0;
    std::int64_t dim_ = 1;
    std::int64_t span_ = 1;
    std::vector<std::pair<std::int64_t, std::vector<std::size_t>>> cells_;
    std::unordered_map<std::int64_t, std::size_t> slot_;
    std::vector<std::pair<std::int64_t, std::int64_t>> forward_;
};

// ------------------------------------------------------------ per-step process

struct EdgeEvents {
    std::vector<EdgeKey> dissolved;
    std::vector<EdgeKey> formed;
};

/** One day of the decentralized link process: dissolution at either node's
 * discretion first, then independent consensus formation over all candidate
 * pairs found through the grid.  Formation probabilities are evaluated
 * against the post-dissolution snapshot of degrees and components.
 */
inline EdgeEvents form_and_dissolve_links(Population& pop, const NetworkConfig& nc,
                                          Step t, Rng& rng, double assort_weight = 0.0,
                                          bool assort_active = false) {
    EdgeEvents ev;

    for (auto& [key, st] : pop.edges) {
        const double q = edge_end_prob(pop.at(key.a), pop.at(key.b), st);
        if (rng.bernoulli(q)) ev.dissolved.push_back(key);
    }
    for (const EdgeKey& key : ev.dissolved) pop.remove_edge(key.a, key.b);

    std::vector<int> degree(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) degree[i] = pop.nodes[i].degree();

    std::vector<std::size_t> roots;
    if (nc.component_modifier != 1.0) roots = component_roots(pop);

    // Upper bound on every modifier product, for thinning: draw one uniform
    // per in-reach candidate against amp_u * amp_v * cap and evaluate the
    // kernel only when that coarse test passes.  Acceptance is u < p exactly.
    double mod_cap = 1.0;
    if (nc.degree_policy.kind == DegreePolicyKind::Preferential) {
        int max_deg = 0;
        for (int d : degree) max_deg = std::max(max_deg, d);
        const double f = degree_modifier(max_deg, nc.degree_policy);
        mod_cap *= f * f;
    }
    mod_cap *= std::max(1.0, nc.component_modifier);
    if (assort_active) mod_cap *= 1.0 + assort_weight;

    const NeighborGrid grid(pop, nc);
    grid.for_each_pair([&](std::size_t i, std::size_t j) {
        const Node& u = pop.nodes[i];
        const Node& v = pop.nodes[j];
        if (nc.opposite_sex_only && u.sex == v.sex) return;
        const double dx = u.pos.x - v.pos.x;
        const double dy = u.pos.y - v.pos.y;
        const double d2 = dx * dx + dy * dy;
        const double reach =
            std::min(kernel_reach(u.spread, nc), kernel_reach(v.spread, nc));
        if (d2 > reach * reach) return;
        if (std::binary_search(u.neighbors.begin(), u.neighbors.end(), v.id)) return;
        const double bound = u.amplitude * v.amplitude * mod_cap;
        if (bound <= 0.0) return;
        const double udraw = rng.uniform();
        if (udraw >= bound) return;
        const bool same_comp = !roots.empty() && roots[i] == roots[j];
        const double p =
            pair_formation_prob(u, v, std::sqrt(d2), degree[i], degree[j], same_comp,
                                nc, assort_weight, assort_active);
        if (udraw < p) ev.formed.push_back(EdgeKey(u.id, v.id));
    });
    for (const EdgeKey& key : ev.formed) pop.add_edge(key.a, key.b, t);
    std::sort(ev.formed.begin(), ev.formed.end());
    return ev;
}

} // namespace driftnet
