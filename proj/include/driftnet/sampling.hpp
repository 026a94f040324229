#pragma once

#include <functional>
#include <map>
#include <vector>

#include "driftnet/config.hpp"
#include "driftnet/population.hpp"
#include "driftnet/rng.hpp"
#include "driftnet/spatial.hpp"

namespace driftnet {

enum class TestStatus { Untested, Negative, Positive };

struct MemberInfo {
    Step added_at = 0;
    int coupons_left = 0;
    TestStatus test = TestStatus::Untested;
};

struct PastInfo {
    Step last_removed = 0;
    std::int64_t times_selected = 0;
};

/** One design's sample s_t: current members, the removal history that drives
 * the replacement damping, and the design parameters phi. */
struct SampleState {
    DesignConfig cfg;
    std::map<NodeId, MemberInfo> members;
    std::map<NodeId, PastInfo> past;

    bool contains(NodeId id) const { return members.count(id) > 0; }

    void add_member(NodeId id, Step t, int coupons = 0) {
        auto [it, inserted] = members.try_emplace(id);
        if (inserted) {
            it->second.added_at = t;
            it->second.coupons_left = coupons;
        }
        auto [pit, fresh] = past.try_emplace(id);
        pit->second.times_selected += 1;
        if (fresh) pit->second.last_removed = -1;
    }

    void remove_member(NodeId id, Step t) {
        if (members.erase(id) > 0) past[id].last_removed = t;
    }
};

/** Damped re-selection probability: base_p for a fresh candidate, base_p * r
 * for one previously sampled and removed.  With a positive recovery horizon
 * the damping relaxes linearly back to full replacement.
 */
inline double effective_selection_prob(double base_p, const PastInfo* past, double r,
                                       double recovery_days, Step now) {
    if (!past || past->last_removed < 0) return base_p;
    double r_eff = r;
    if (recovery_days > 0.0) {
        const double dt = static_cast<double>(now - past->last_removed);
        r_eff = std::min(1.0, r + (1.0 - r) * dt / recovery_days);
    }
    return base_p * r_eff;
}

inline double damping(const SampleState& s, NodeId candidate, Step now) {
    auto it = s.past.find(candidate);
    const PastInfo* p = it == s.past.end() ? nullptr : &it->second;
    return effective_selection_prob(1.0, p, s.cfg.replacement,
                                    s.cfg.replacement_recovery_days, now);
}

/// 1 - prod(1 - p_ij) over the candidate's in-sample neighbors; p_ij may
/// depend on origin, destination, and link values.
using LinkProbFn =
    std::function<double(const Node& origin, const Node& dest, const EdgeState&)>;

inline double link_trace_inclusion_prob(const Node& candidate, const SampleState& s,
                                        const Population& pop, const LinkProbFn& p_fn) {
    double miss = 1.0;
    for (NodeId j : candidate.neighbors) {
        if (!s.contains(j)) continue;
        const auto& st = pop.edges.at(EdgeKey(candidate.id, j));
        miss *= 1.0 - p_fn(pop.at(j), candidate, st);
    }
    return 1.0 - miss;
}

// ------------------------------------------------------------------- removal

// q = (n_t - n_target)/n_t when the sample exceeds its target, else 0.
inline double target_size_removal_q(std::int64_t n_t, std::int64_t n_target) {
    if (n_t <= 0 || n_t <= n_target) return 0.0;
    return static_cast<double>(n_t - n_target) / static_cast<double>(n_t);
}

// Bernoulli removals.  The target-size rule uses q = (n_t - n_target)/n_t when
// positive; the per-node rule grows q_i with time in sample.  extra_q, when
// set, can raise individual members' removal probability (seek-and-treat).
inline std::vector<NodeId>
removal_step(SampleState& s, Step t, Rng& rng,
             const std::function<double(NodeId, const MemberInfo&)>& extra_q = {}) {
    double q_common = 0.0;
    if (s.cfg.removal.kind == RemovalRule::Kind::TargetSize && s.cfg.target_size > 0) {
        q_common = target_size_removal_q(static_cast<std::int64_t>(s.members.size()),
                                         s.cfg.target_size);
    }
    std::vector<NodeId> removed;
    for (const auto& [id, info] : s.members) {
        double q = q_common;
        if (s.cfg.removal.kind == RemovalRule::Kind::PerNode)
            q = std::min(1.0, s.cfg.removal.base_q +
                                  s.cfg.removal.time_in_sample_factor *
                                      static_cast<double>(t - info.added_at));
        if (extra_q) q = std::max(q, extra_q(id, info));
        if (rng.bernoulli(q)) removed.push_back(id);
    }
    for (NodeId id : removed) s.remove_member(id, t);
    return removed;
}

// A node deleted from the population leaves every sample.
inline void purge_dead(SampleState& s, const std::vector<NodeId>& dead_sorted, Step t) {
    std::vector<NodeId> gone;
    for (const auto& [id, info] : s.members)
        if (std::binary_search(dead_sorted.begin(), dead_sorted.end(), id))
            gone.push_back(id);
    for (NodeId id : gone) s.remove_member(id, t);
}

// ------------------------------------------------------------ initial designs

namespace detail {

inline std::vector<std::size_t> srswor_indices(std::size_t n, std::size_t from, Rng& rng) {
    std::vector<std::size_t> idx(from);
    for (std::size_t i = 0; i < from; ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + rng.uniform_int(from - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace detail

/** Seed a sample per its design: Bernoulli(p) over all nodes, SRSWOR of n,
 * n with-replacement draws, or Bernoulli restricted to a disk.  Link-tracing
 * kinds seed through their nested initial design; a random walk starts at one
 * uniformly chosen node.
 */
inline SampleState init_sample(const DesignConfig& cfg, const Population& pop, Rng& rng) {
    SampleState s;
    s.cfg = cfg;
    const Step t0 = 0;
    const int coupons = cfg.kind == DesignKind::Rds ? cfg.coupons : 0;

    auto bernoulli_over = [&](double p, bool disk, Vec2 center, double radius) {
        for (const auto& n : pop.nodes) {
            if (disk && distance(n.pos, center) > radius) continue;
            if (rng.bernoulli(p)) s.add_member(n.id, t0, coupons);
        }
    };
    auto srswor_over = [&](int n_draw) {
        require(static_cast<std::size_t>(n_draw) <= pop.size(), "design.n",
                "SRSWOR size exceeds population size");
        if (n_draw > 0)
            for (std::size_t i : detail::srswor_indices(n_draw, pop.size(), rng))
                s.add_member(pop.nodes[i].id, t0, coupons);
    };
    auto with_replacement_over = [&](int n_draw) {
        for (int i = 0; i < n_draw && !pop.nodes.empty(); ++i)
            s.add_member(pop.nodes[rng.uniform_int(pop.size())].id, t0, coupons);
    };

    switch (cfg.kind) {
    case DesignKind::Bernoulli:
        bernoulli_over(cfg.p, false, {}, 0.0);
        break;
    case DesignKind::Srswor:
        srswor_over(cfg.n);
        break;
    case DesignKind::WithReplacement:
        with_replacement_over(cfg.n);
        break;
    case DesignKind::SpatialBernoulli:
        bernoulli_over(cfg.p, true, cfg.center, cfg.radius);
        break;
    case DesignKind::RandomWalk:
        if (!pop.nodes.empty())
            s.add_member(pop.nodes[rng.uniform_int(pop.size())].id, t0);
        break;
    case DesignKind::LinkTrace:
    case DesignKind::LinkTraceFixedN:
    case DesignKind::Rds:
        switch (cfg.initial.kind) {
        case InitialDesign::Kind::None:
            break;
        case InitialDesign::Kind::Bernoulli:
            bernoulli_over(cfg.initial.p, false, {}, 0.0);
            break;
        case InitialDesign::Kind::Srswor:
            require(static_cast<std::size_t>(cfg.initial.n) <= pop.size(),
                    "design.initial.n", "SRSWOR size exceeds population size");
            if (cfg.initial.n > 0)
                for (std::size_t i :
                     detail::srswor_indices(cfg.initial.n, pop.size(), rng))
                    s.add_member(pop.nodes[i].id, t0, coupons);
            break;
        case InitialDesign::Kind::WithReplacement:
            with_replacement_over(cfg.initial.n);
            break;
        case InitialDesign::Kind::SpatialBernoulli:
            bernoulli_over(cfg.initial.p, true, cfg.initial.center, cfg.initial.radius);
            break;
        }
        break;
    }
    return s;
}

// -------------------------------------------------------------- step kernels

struct SampleStepEvents {
    std::vector<NodeId> added;
    std::vector<NodeId> removed;
};

/** Bernoulli tracing of every link out of the sample, each with its own
 * probability damped by the candidate's replacement factor, supplemented by
 * independent Bernoulli(p_r) selections from outside the sample.
 */
inline std::vector<NodeId> link_trace_additions(SampleState& s, const Population& pop,
                                                Step t, Rng& rng,
                                                const LinkProbFn& p_fn) {
    std::map<NodeId, bool> hit;
    for (const auto& [mid, info] : s.members) {
        const Node* m = pop.find(mid);
        if (!m) continue;
        for (NodeId nb : m->neighbors) {
            if (s.contains(nb)) continue;
            const Node& cand = pop.at(nb);
            const auto& st = pop.edges.at(EdgeKey(mid, nb));
            const double p = p_fn(*m, cand, st) * damping(s, nb, t);
            if (rng.bernoulli(clamp01(p))) hit[nb] = true;
        }
    }
    if (s.cfg.random_supplement_p > 0.0) {
        for (const auto& n : pop.nodes) {
            if (s.contains(n.id)) continue;
            const double p = s.cfg.random_supplement_p * damping(s, n.id, t);
            if (rng.bernoulli(clamp01(p))) hit[n.id] = true;
        }
    }
    std::vector<NodeId> added;
    for (const auto& [id, flag] : hit) {
        s.add_member(id, t);
        added.push_back(id);
    }
    return added;
}

/** Fixed-n variant: a without-replacement sample of n_links links out of the
 * sample; when fewer links exist the shortfall is filled by simple random
 * sampling from the nodes outside (fill-ins count toward n_links).
 */
inline std::vector<NodeId> link_trace_fixed_n_additions(SampleState& s,
                                                        const Population& pop, Step t,
                                                        Rng& rng) {
    // Out-links in deterministic (member, neighbor) order.
    std::vector<std::pair<NodeId, NodeId>> out_links;
    for (const auto& [mid, info] : s.members) {
        const Node* m = pop.find(mid);
        if (!m) continue;
        for (NodeId nb : m->neighbors)
            if (!s.contains(nb)) out_links.emplace_back(mid, nb);
    }
    std::map<NodeId, bool> hit;
    const std::size_t want = static_cast<std::size_t>(s.cfg.n_links);
    const std::size_t take = std::min(want, out_links.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.uniform_int(out_links.size() - i);
        std::swap(out_links[i], out_links[j]);
        const NodeId cand = out_links[i].second;
        if (!hit.count(cand) && rng.bernoulli(damping(s, cand, t))) hit[cand] = true;
    }
    if (take < want) {
        std::vector<NodeId> outside;
        for (const auto& n : pop.nodes)
            if (!s.contains(n.id) && !hit.count(n.id)) outside.push_back(n.id);
        const std::size_t fill = std::min(want - take, outside.size());
        for (std::size_t i = 0; i < fill; ++i) {
            const std::size_t j = i + rng.uniform_int(outside.size() - i);
            std::swap(outside[i], outside[j]);
            if (rng.bernoulli(damping(s, outside[i], t))) hit[outside[i]] = true;
        }
    }
    std::vector<NodeId> added;
    for (const auto& [id, flag] : hit) {
        s.add_member(id, t);
        added.push_back(id);
    }
    return added;
}

/** One move of the single-node random walk: follow a uniformly chosen link
 * with probability 1 - jump_p, otherwise jump uniformly over the other
 * N_t - 1 nodes.  An isolated current node escalates the jump probability to
 * the rescue value; a dead or missing walker restarts uniformly at random.
 */
inline void random_walk_step(SampleState& s, const Population& pop, Step t, Rng& rng) {
    if (pop.nodes.empty()) { // suspended until nodes exist again
        return;
    }
    if (s.members.empty()) { // restart after the walker died (or first activation)
        s.add_member(pop.nodes[rng.uniform_int(pop.size())].id, t);
        return;
    }
    const NodeId cur = s.members.begin()->first;
    const Node& node = pop.at(cur);
    if (pop.size() <= 1) return;

    const bool isolated = node.neighbors.empty();
    const double jump_p = isolated ? std::max(s.cfg.jump_p, s.cfg.rescue_jump_p)
                                   : s.cfg.jump_p;
    NodeId target = cur;
    if (rng.bernoulli(jump_p)) {
        std::size_t pick = rng.uniform_int(pop.size() - 1);
        const Node& chosen = pop.nodes[pick + (pop.nodes[pick].id >= cur ? 1 : 0)];
        target = chosen.id;
    } else if (!isolated) {
        target = node.neighbors[rng.uniform_int(node.neighbors.size())];
    }
    if (target != cur) {
        s.remove_member(cur, t);
        s.add_member(target, t);
    }
}

/** Coupon recruitment: each member spends up to its remaining coupons on
 * uniformly chosen un-sampled neighbors; recruits join with a fresh set of k
 * coupons and recruit from the next step on.
 */
inline std::vector<NodeId> rds_coupon_step(SampleState& s, const Population& pop, Step t,
                                           Rng& rng) {
    std::vector<NodeId> member_ids;
    for (const auto& [id, info] : s.members) member_ids.push_back(id);

    std::vector<NodeId> added;
    std::map<NodeId, bool> new_set;
    for (NodeId mid : member_ids) {
        MemberInfo& info = s.members.at(mid);
        if (info.coupons_left <= 0) continue;
        const Node* m = pop.find(mid);
        if (!m) continue;
        std::vector<NodeId> cands;
        for (NodeId nb : m->neighbors)
            if (!s.contains(nb) && !new_set.count(nb)) cands.push_back(nb);
        const std::size_t give =
            std::min<std::size_t>(info.coupons_left, cands.size());
        for (std::size_t i = 0; i < give; ++i) {
            const std::size_t j = i + rng.uniform_int(cands.size() - i);
            std::swap(cands[i], cands[j]);
            const NodeId cand = cands[i];
            if (rng.bernoulli(damping(s, cand, t))) {
                new_set[cand] = true;
                added.push_back(cand);
                info.coupons_left -= 1; // coupon spent on a successful recruit
            }
        }
    }
    std::sort(added.begin(), added.end());
    for (NodeId id : added) s.add_member(id, t, s.cfg.coupons);
    return added;
}

/// Per-step selection/removal for one design.  p_fn and extra_q let an owner
/// (the seek-and-treat strategy) shape tracing and removal probabilities.
inline SampleStepEvents
step_design(SampleState& s, const Population& pop, Step t, Rng& rng,
            const LinkProbFn& p_fn_override = {},
            const std::function<double(NodeId, const MemberInfo&)>& extra_q = {}) {
    SampleStepEvents ev;
    const LinkProbFn p_fn =
        p_fn_override
            ? p_fn_override
            : LinkProbFn([&s](const Node&, const Node&, const EdgeState&) {
                  return s.cfg.follow_p;
              });
    switch (s.cfg.kind) {
    case DesignKind::Bernoulli:
        for (const auto& n : pop.nodes) {
            if (s.contains(n.id)) continue;
            const double p = s.cfg.p * damping(s, n.id, t);
            if (rng.bernoulli(clamp01(p))) {
                s.add_member(n.id, t);
                ev.added.push_back(n.id);
            }
        }
        break;
    case DesignKind::Srswor:
    case DesignKind::WithReplacement:
    case DesignKind::SpatialBernoulli:
        break; // one-shot initial designs: only removal applies per step
    case DesignKind::LinkTrace:
        ev.added = link_trace_additions(s, pop, t, rng, p_fn);
        break;
    case DesignKind::LinkTraceFixedN:
        ev.added = link_trace_fixed_n_additions(s, pop, t, rng);
        break;
    case DesignKind::RandomWalk: {
        const auto before = s.members;
        random_walk_step(s, pop, t, rng);
        for (const auto& [id, info] : s.members)
            if (!before.count(id)) ev.added.push_back(id);
        for (const auto& [id, info] : before)
            if (!s.contains(id)) ev.removed.push_back(id);
        return ev; // the walk manages its own single-member turnover
    }
    case DesignKind::Rds:
        ev.added = rds_coupon_step(s, pop, t, rng);
        break;
    }
    ev.removed = removal_step(s, t, rng, extra_q);
    return ev;
}

} // namespace driftnet
