#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <vector>

#include "driftnet/common.hpp"
#include "driftnet/infection.hpp"

namespace driftnet {

enum class Sex { Female, Male };

/// One cluster of the spatial point process.
struct Group {
    int id = 0;
    Vec2 center;
    Vec2 prev_displacement; // delta_{t-1}
    double target_size = 0.0;
    double lambda = 0.0; // initial Poisson mean
};

struct Node {
    NodeId id = 0;
    Sex sex = Sex::Female;
    int group = 0;
    Vec2 offset;      // relative to group center, time t-1 lag after init
    Vec2 offset_prev; // time t-2 lag
    Vec2 pos;         // absolute position, refreshed after each motion phase
    Step born_at = 0;

    // link formation / dissolution tendencies (node-specific)
    double amplitude = 0.0;
    double spread = 1.0;
    double end_hazard = 0.0; // per-day chance this endpoint ends a partnership

    // host risk values
    double contact_prob = 0.0; // per-partnership daily contact probability
    bool gud = false;
    double resistance = 0.0; // 0 fully susceptible, 1 immune
    bool adopter = false;    // pair-strategy participation

    std::optional<Infection> infection;
    Step first_infected_at = -1; // -1 = never infected

    std::vector<NodeId> neighbors; // sorted

    bool infected() const { return infection.has_value(); }
    int degree() const { return static_cast<int>(neighbors.size()); }
};

struct EdgeKey {
    NodeId a = 0; // always a < b
    NodeId b = 0;
    EdgeKey() = default;
    EdgeKey(NodeId u, NodeId v) : a(std::min(u, v)), b(std::max(u, v)) {}
    auto operator<=>(const EdgeKey&) const = default;
};

/// Pair-strategy state carried on an edge (x-values).
struct PairStrategy {
    bool active = false; // both partners adopt
    bool safer_sex = false;
    bool tested = false;
    bool result_a = false; // test outcome for the endpoint with the smaller id
    bool result_b = false;
};

struct EdgeState {
    Step formed_at = 0;
    PairStrategy pair;
    std::optional<double> end_hazard_override; // per-edge dissolution rate, if set
};

/** The population graph G_t: nodes, edges, and their values.
 *
 * Nodes are kept sorted by id (ids are never reused), edges in a key-ordered
 * map; every iteration over either is therefore deterministic.
 */
class Population {
public:
    std::vector<Node> nodes; // sorted by id
    std::map<EdgeKey, EdgeState> edges;
    NodeId next_id = 0;

    std::size_t size() const { return nodes.size(); }

    Node* find(NodeId id) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                                   [](const Node& n, NodeId v) { return n.id < v; });
        return (it != nodes.end() && it->id == id) ? &*it : nullptr;
    }
    const Node* find(NodeId id) const {
        return const_cast<Population*>(this)->find(id);
    }

    Node& at(NodeId id) {
        Node* n = find(id);
        assert(n != nullptr);
        return *n;
    }
    const Node& at(NodeId id) const { return const_cast<Population*>(this)->at(id); }

    NodeId add_node(Node n) {
        n.id = next_id++;
        nodes.push_back(std::move(n));
        return nodes.back().id;
    }

    bool has_edge(NodeId u, NodeId v) const { return edges.count(EdgeKey(u, v)) > 0; }

    EdgeState& add_edge(NodeId u, NodeId v, Step formed_at) {
        assert(u != v);
        auto [it, inserted] = edges.try_emplace(EdgeKey(u, v));
        if (inserted) {
            it->second.formed_at = formed_at;
            insert_sorted(at(u).neighbors, v);
            insert_sorted(at(v).neighbors, u);
        }
        return it->second;
    }

    void remove_edge(NodeId u, NodeId v) {
        if (edges.erase(EdgeKey(u, v)) > 0) {
            erase_value(at(u).neighbors, v);
            erase_value(at(v).neighbors, u);
        }
    }

    // Removes the nodes and every incident edge; ids must be sorted.
    // Returns the number of edges dropped.
    std::size_t remove_nodes(const std::vector<NodeId>& ids) {
        std::size_t dropped = 0;
        for (NodeId id : ids) {
            Node& n = at(id);
            for (NodeId nb : n.neighbors) {
                edges.erase(EdgeKey(id, nb));
                erase_value(at(nb).neighbors, id);
                ++dropped;
            }
            n.neighbors.clear();
        }
        auto dead = [&](const Node& n) {
            return std::binary_search(ids.begin(), ids.end(), n.id);
        };
        nodes.erase(std::remove_if(nodes.begin(), nodes.end(), dead), nodes.end());
        return dropped;
    }

    std::int64_t infected_count() const {
        std::int64_t k = 0;
        for (const auto& n : nodes) k += n.infected() ? 1 : 0;
        return k;
    }

    // Every edge endpoint and neighbor entry refers to a live node.
    bool check_integrity() const {
        for (const auto& [key, st] : edges)
            if (!find(key.a) || !find(key.b)) return false;
        for (const auto& n : nodes)
            for (NodeId nb : n.neighbors)
                if (!find(nb) || !has_edge(n.id, nb)) return false;
        return true;
    }

private:
    static void insert_sorted(std::vector<NodeId>& v, NodeId x) {
        v.insert(std::upper_bound(v.begin(), v.end(), x), x);
    }
    static void erase_value(std::vector<NodeId>& v, NodeId x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it != v.end() && *it == x) v.erase(it);
    }
};

} // namespace driftnet
