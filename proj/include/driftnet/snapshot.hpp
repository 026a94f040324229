#pragma once

#include <string>

#include <json.hpp>

#include "driftnet/config_json.hpp"
#include "driftnet/engine.hpp"

namespace driftnet {

constexpr int kSnapshotVersion = 1;

namespace snapjson {

inline ojson write_vec2(const Vec2& v) { return ojson::array({v.x, v.y}); }

inline Vec2 read_vec2(const ojson& j, const std::string& path) {
    require(j.is_array() && j.size() == 2, path, "expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::string stage_name(Stage s) {
    switch (s) {
    case Stage::Early: return "early";
    case Stage::Chronic: return "chronic";
    case Stage::Late: return "late";
    }
    return "early";
}

inline Stage stage_from(const std::string& s, const std::string& path) {
    if (s == "early") return Stage::Early;
    if (s == "chronic") return Stage::Chronic;
    if (s == "late") return Stage::Late;
    throw ConfigError(path, "unknown stage '" + s + "'");
}

inline ojson write_node(const Node& n) {
    ojson j;
    j["id"] = n.id;
    j["sex"] = n.sex == Sex::Male ? "m" : "f";
    j["group"] = n.group;
    j["offset"] = write_vec2(n.offset);
    j["offset_prev"] = write_vec2(n.offset_prev);
    j["pos"] = write_vec2(n.pos);
    j["born_at"] = n.born_at;
    j["amplitude"] = n.amplitude;
    j["spread"] = n.spread;
    j["end_hazard"] = n.end_hazard;
    j["contact_prob"] = n.contact_prob;
    j["gud"] = n.gud;
    j["resistance"] = n.resistance;
    j["adopter"] = n.adopter;
    j["first_infected_at"] = n.first_infected_at;
    if (n.infection) {
        const Infection& inf = *n.infection;
        j["infection"] = {{"chronic_rate", inf.strain.chronic_rate},
                          {"early_rate", inf.strain.early_rate},
                          {"family", inf.strain.family},
                          {"serial", inf.strain.serial},
                          {"stage", stage_name(inf.stage)},
                          {"infected_at", inf.infected_at},
                          {"early_duration", inf.early_duration},
                          {"chronic_duration", inf.chronic_duration},
                          {"chronic_at", inf.chronic_at},
                          {"treated", inf.treated}};
    }
    return j;
}

inline Node read_node(const ojson& j, const std::string& path) {
    Node n;
    n.id = j.at("id").get<NodeId>();
    n.sex = j.at("sex").get<std::string>() == "m" ? Sex::Male : Sex::Female;
    n.group = j.at("group").get<int>();
    n.offset = read_vec2(j.at("offset"), path + ".offset");
    n.offset_prev = read_vec2(j.at("offset_prev"), path + ".offset_prev");
    n.pos = read_vec2(j.at("pos"), path + ".pos");
    n.born_at = j.at("born_at").get<Step>();
    n.amplitude = j.at("amplitude").get<double>();
    n.spread = j.at("spread").get<double>();
    n.end_hazard = j.at("end_hazard").get<double>();
    n.contact_prob = j.at("contact_prob").get<double>();
    n.gud = j.at("gud").get<bool>();
    n.resistance = j.at("resistance").get<double>();
    n.adopter = j.at("adopter").get<bool>();
    n.first_infected_at = j.at("first_infected_at").get<Step>();
    if (j.contains("infection")) {
        const ojson& i = j.at("infection");
        Infection inf;
        inf.strain.chronic_rate = i.at("chronic_rate").get<double>();
        inf.strain.early_rate = i.at("early_rate").get<double>();
        inf.strain.family = i.at("family").get<int>();
        inf.strain.serial = i.at("serial").get<std::uint64_t>();
        inf.stage = stage_from(i.at("stage").get<std::string>(), path + ".infection.stage");
        inf.infected_at = i.at("infected_at").get<Step>();
        inf.early_duration = i.at("early_duration").get<std::int64_t>();
        inf.chronic_duration = i.at("chronic_duration").get<std::int64_t>();
        inf.chronic_at = i.at("chronic_at").get<Step>();
        inf.treated = i.at("treated").get<bool>();
        n.infection = inf;
    }
    return n;
}

} // namespace snapjson

/** Versioned full serialization of a run state, RNG stream included.
 * save -> load -> save is byte-identical, and a loaded state continues on
 * the exact trajectory of the original.
 */
inline std::string save_snapshot(const SimState& s) {
    using namespace snapjson;
    ojson j;
    j["snapshot_version"] = kSnapshotVersion;
    j["config"] = cfgjson::write_sim_config(s.cfg);
    j["t"] = s.t;
    j["strain_serial"] = s.strain_serial;
    j["rng"] = s.rng.save();

    ojson groups = ojson::array();
    for (const auto& g : s.groups)
        groups.push_back({{"id", g.id},
                          {"center", write_vec2(g.center)},
                          {"prev_displacement", write_vec2(g.prev_displacement)},
                          {"target_size", g.target_size},
                          {"lambda", g.lambda}});
    j["groups"] = groups;

    ojson nodes = ojson::array();
    for (const auto& n : s.pop.nodes) nodes.push_back(write_node(n));
    ojson edges = ojson::array();
    for (const auto& [key, st] : s.pop.edges) {
        ojson e;
        e["a"] = key.a;
        e["b"] = key.b;
        e["formed_at"] = st.formed_at;
        e["pair"] = {{"active", st.pair.active},
                     {"safer_sex", st.pair.safer_sex},
                     {"tested", st.pair.tested},
                     {"result_a", st.pair.result_a},
                     {"result_b", st.pair.result_b}};
        if (st.end_hazard_override) e["end_hazard_override"] = *st.end_hazard_override;
        edges.push_back(e);
    }
    j["population"] = {{"next_id", s.pop.next_id}, {"nodes", nodes}, {"edges", edges}};

    ojson samples = ojson::array();
    for (const auto& sr : s.samples) {
        ojson members = ojson::array();
        for (const auto& [id, info] : sr.state.members)
            members.push_back({{"id", id},
                               {"added_at", info.added_at},
                               {"coupons_left", info.coupons_left},
                               {"test", static_cast<int>(info.test)}});
        ojson past = ojson::array();
        for (const auto& [id, info] : sr.state.past)
            past.push_back({{"id", id},
                            {"last_removed", info.last_removed},
                            {"times_selected", info.times_selected}});
        samples.push_back({{"members", members}, {"past", past}});
    }
    j["samples"] = samples;

    j["diagnostics"] = {
        {"ecf",
         {{"a_max", s.ecf.fixed_grid() ? s.ecf.a_max() : 0.0},
          {"count", s.ecf.fixed_grid()
                        ? s.ecf.count() - static_cast<std::int64_t>(s.ecf.pending().size())
                        : 0},
          {"sum_cos", s.ecf.sum_cos()},
          {"sum_sin", s.ecf.sum_sin()},
          {"pending", s.ecf.pending()}}},
        {"cum",
         {{"sum", s.cum.sum()}, {"count", s.cum.count()}, {"histogram", s.cum.histogram()}}},
        {"counters",
         {{"transmissions_cum", s.transmissions_cum},
          {"tests_cum", s.tests_cum},
          {"cures_cum", s.cures_cum},
          {"treatments_cum", s.treatments_cum},
          {"vaccinations_cum", s.vaccinations_cum},
          {"adopter_incidence_cum", s.adopter_incidence_cum},
          {"nonadopter_incidence_cum", s.nonadopter_incidence_cum}}},
        {"event_log", s.event_log}};
    return j.dump(2) + "\n";
}

inline SimState load_snapshot(const std::string& text) {
    using namespace snapjson;
    const ojson j = cfgjson::parse_document(text);
    require(j.is_object() && j.contains("snapshot_version"), "snapshot",
            "not a snapshot document");
    const int version = j.at("snapshot_version").get<int>();
    require(version == kSnapshotVersion, "snapshot_version",
            "file has version " + std::to_string(version) + ", this build reads version " +
                std::to_string(kSnapshotVersion));

    SimState s;
    s.cfg = cfgjson::read_sim_config(j.at("config"), "snapshot.config");
    s.cfg.resolve();
    s.cfg.validate();
    detail::wire_cached_config(s);
    s.t = j.at("t").get<Step>();
    s.strain_serial = j.at("strain_serial").get<std::uint64_t>();
    s.rng.restore(j.at("rng").get<std::string>());

    for (const auto& g : j.at("groups")) {
        Group group;
        group.id = g.at("id").get<int>();
        group.center = read_vec2(g.at("center"), "snapshot.groups.center");
        group.prev_displacement =
            read_vec2(g.at("prev_displacement"), "snapshot.groups.prev_displacement");
        group.target_size = g.at("target_size").get<double>();
        group.lambda = g.at("lambda").get<double>();
        s.groups.push_back(group);
    }

    const ojson& pop = j.at("population");
    s.pop.next_id = pop.at("next_id").get<NodeId>();
    for (std::size_t i = 0; i < pop.at("nodes").size(); ++i)
        s.pop.nodes.push_back(read_node(pop.at("nodes")[i], "snapshot.nodes"));
    for (const auto& e : pop.at("edges")) {
        EdgeState& st = s.pop.add_edge(e.at("a").get<NodeId>(), e.at("b").get<NodeId>(),
                                       e.at("formed_at").get<Step>());
        const ojson& p = e.at("pair");
        st.pair.active = p.at("active").get<bool>();
        st.pair.safer_sex = p.at("safer_sex").get<bool>();
        st.pair.tested = p.at("tested").get<bool>();
        st.pair.result_a = p.at("result_a").get<bool>();
        st.pair.result_b = p.at("result_b").get<bool>();
        if (e.contains("end_hazard_override"))
            st.end_hazard_override = e.at("end_hazard_override").get<double>();
    }

    std::size_t expected =
        s.cfg.designs.size();
    for (const auto& iv : s.cfg.interventions)
        if (iv.design) ++expected;
    require(j.at("samples").size() == expected, "snapshot.samples",
            "sample count does not match the config's designs");
    std::size_t si = 0;
    auto attach = [&](const DesignConfig& cfg, int iv_index) {
        SampleRuntime sr;
        sr.state.cfg = cfg;
        sr.intervention = iv_index;
        const ojson& sj = j.at("samples")[si++];
        for (const auto& m : sj.at("members")) {
            MemberInfo info;
            info.added_at = m.at("added_at").get<Step>();
            info.coupons_left = m.at("coupons_left").get<int>();
            info.test = static_cast<TestStatus>(m.at("test").get<int>());
            sr.state.members.emplace(m.at("id").get<NodeId>(), info);
        }
        for (const auto& p : sj.at("past")) {
            PastInfo info;
            info.last_removed = p.at("last_removed").get<Step>();
            info.times_selected = p.at("times_selected").get<std::int64_t>();
            sr.state.past.emplace(p.at("id").get<NodeId>(), info);
        }
        s.samples.push_back(std::move(sr));
    };
    for (const auto& d : s.cfg.designs) attach(d, -1);
    for (std::size_t i = 0; i < s.cfg.interventions.size(); ++i)
        if (s.cfg.interventions[i].design)
            attach(*s.cfg.interventions[i].design, static_cast<int>(i));

    const ojson& diag = j.at("diagnostics");
    s.ecf = EcfAccumulator(s.cfg.diagnostics.ecf);
    {
        const ojson& e = diag.at("ecf");
        s.ecf.restore(e.at("a_max").get<double>(),
                      e.at("sum_cos").get<std::vector<double>>(),
                      e.at("sum_sin").get<std::vector<double>>(),
                      e.at("count").get<std::int64_t>(),
                      e.at("pending").get<std::vector<double>>());
    }
    s.cum = CumulativeTracker(s.cfg.diagnostics.histogram_bins,
                              s.cfg.diagnostics.histogram_min,
                              s.cfg.diagnostics.histogram_max);
    {
        const ojson& c = diag.at("cum");
        s.cum.restore(c.at("sum").get<double>(), c.at("count").get<std::int64_t>(),
                      c.at("histogram").get<std::vector<std::int64_t>>());
    }
    const ojson& k = diag.at("counters");
    s.transmissions_cum = k.at("transmissions_cum").get<std::int64_t>();
    s.tests_cum = k.at("tests_cum").get<std::int64_t>();
    s.cures_cum = k.at("cures_cum").get<std::int64_t>();
    s.treatments_cum = k.at("treatments_cum").get<std::int64_t>();
    s.vaccinations_cum = k.at("vaccinations_cum").get<std::int64_t>();
    s.adopter_incidence_cum = k.at("adopter_incidence_cum").get<std::int64_t>();
    s.nonadopter_incidence_cum = k.at("nonadopter_incidence_cum").get<std::int64_t>();
    s.event_log = diag.at("event_log").get<std::vector<std::string>>();
    return s;
}

} // namespace driftnet
