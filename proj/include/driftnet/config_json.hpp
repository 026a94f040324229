#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftnet/config.hpp"

namespace driftnet {

using ojson = nlohmann::ordered_json;

// ------------------------------------------------------------------ helpers

namespace cfgjson {

inline std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline ojson parse_document(const std::string& text) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError("syntax", "parse error at line " + std::to_string(line) +
                                        ", column " + std::to_string(col));
    }
}

/// Strict object reader: every key must be consumed, unknown keys are errors.
class Obj {
public:
    Obj(const ojson& o, std::string path) : o_(o), path_(std::move(path)) {
        require(o_.is_object(), path_, "expected an object");
    }

    bool has(const std::string& key) {
        known_.insert(key);
        return o_.contains(key);
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        known_.insert(key);
        if (!o_.contains(key)) return;
        read(o_.at(key), path_ + "." + key, out);
    }

    const ojson* sub(const std::string& key) {
        known_.insert(key);
        if (!o_.contains(key)) return nullptr;
        return &o_.at(key);
    }

    void done() const {
        for (auto it = o_.begin(); it != o_.end(); ++it)
            require(known_.count(it.key()) > 0, path_ + "." + it.key(), "unknown key");
    }

    const std::string& path() const { return path_; }

private:
    static void read(const ojson& v, const std::string& p, double& out) {
        require(v.is_number(), p, "expected a number");
        out = v.get<double>();
    }
    static void read(const ojson& v, const std::string& p, bool& out) {
        require(v.is_boolean(), p, "expected a boolean");
        out = v.get<bool>();
    }
    static void read(const ojson& v, const std::string& p, int& out) {
        require(v.is_number_integer(), p, "expected an integer");
        out = v.get<int>();
    }
    static void read(const ojson& v, const std::string& p, std::int64_t& out) {
        require(v.is_number_integer(), p, "expected an integer");
        out = v.get<std::int64_t>();
    }
    static void read(const ojson& v, const std::string& p, std::uint64_t& out) {
        require(v.is_number_integer() && !v.is_number_float(), p, "expected an integer");
        out = v.get<std::uint64_t>();
    }
    static void read(const ojson& v, const std::string& p, std::string& out) {
        require(v.is_string(), p, "expected a string");
        out = v.get<std::string>();
    }
    static void read(const ojson& v, const std::string& p, Vec2& out) {
        require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(), p,
                "expected [x, y]");
        out.x = v[0].get<double>();
        out.y = v[1].get<double>();
    }

    const ojson& o_;
    std::string path_;
    std::set<std::string> known_;
};

template <typename Enum>
struct EnumMap {
    std::vector<std::pair<std::string, Enum>> entries;
    Enum parse(const std::string& s, const std::string& path) const {
        for (const auto& [name, v] : entries)
            if (name == s) return v;
        std::string allowed;
        for (const auto& [name, v] : entries) allowed += (allowed.empty() ? "" : ", ") + name;
        throw ConfigError(path, "must be one of: " + allowed);
    }
    std::string name(Enum v) const {
        for (const auto& [name, e] : entries)
            if (e == v) return name;
        return "?";
    }
};

inline const EnumMap<GroupSizeConfig::Kind>& group_size_kinds() {
    static const EnumMap<GroupSizeConfig::Kind> m{{
        {"fixed", GroupSizeConfig::Kind::Fixed},
        {"lognormal", GroupSizeConfig::Kind::Lognormal},
    }};
    return m;
}
inline const EnumMap<KernelKind>& kernel_kinds() {
    static const EnumMap<KernelKind> m{{
        {"normal", KernelKind::Normal},
        {"logistic", KernelKind::Logistic},
        {"disk", KernelKind::Disk},
    }};
    return m;
}
inline const EnumMap<DegreePolicyKind>& degree_policy_kinds() {
    static const EnumMap<DegreePolicyKind> m{{
        {"none", DegreePolicyKind::None},
        {"compensatory", DegreePolicyKind::Compensatory},
        {"preferential", DegreePolicyKind::Preferential},
    }};
    return m;
}
inline const EnumMap<DesignKind>& design_kinds() {
    static const EnumMap<DesignKind> m{{
        {"bernoulli", DesignKind::Bernoulli},
        {"srswor", DesignKind::Srswor},
        {"with_replacement", DesignKind::WithReplacement},
        {"spatial_bernoulli", DesignKind::SpatialBernoulli},
        {"link_trace", DesignKind::LinkTrace},
        {"link_trace_fixed_n", DesignKind::LinkTraceFixedN},
        {"random_walk", DesignKind::RandomWalk},
        {"rds", DesignKind::Rds},
    }};
    return m;
}
inline const EnumMap<InitialDesign::Kind>& initial_kinds() {
    static const EnumMap<InitialDesign::Kind> m{{
        {"none", InitialDesign::Kind::None},
        {"bernoulli", InitialDesign::Kind::Bernoulli},
        {"srswor", InitialDesign::Kind::Srswor},
        {"with_replacement", InitialDesign::Kind::WithReplacement},
        {"spatial_bernoulli", InitialDesign::Kind::SpatialBernoulli},
    }};
    return m;
}
inline const EnumMap<RemovalRule::Kind>& removal_kinds() {
    static const EnumMap<RemovalRule::Kind> m{{
        {"target_size", RemovalRule::Kind::TargetSize},
        {"per_node", RemovalRule::Kind::PerNode},
    }};
    return m;
}
inline const EnumMap<EpidemicConfig::EarlyModel>& early_models() {
    static const EnumMap<EpidemicConfig::EarlyModel> m{{
        {"geometric", EpidemicConfig::EarlyModel::Geometric},
        {"weibull", EpidemicConfig::EarlyModel::Weibull},
    }};
    return m;
}
inline const EnumMap<EvolutionConfig::Increment>& increments() {
    static const EnumMap<EvolutionConfig::Increment> m{{
        {"uniform", EvolutionConfig::Increment::Uniform},
        {"normal", EvolutionConfig::Increment::Normal},
    }};
    return m;
}
inline const EnumMap<InterventionKind>& intervention_kinds() {
    static const EnumMap<InterventionKind> m{{
        {"pair_safer_sex_test", InterventionKind::PairSaferSexTest},
        {"cure", InterventionKind::Cure},
        {"treatment", InterventionKind::Treatment},
        {"vaccine", InterventionKind::Vaccine},
        {"seek_and_treat", InterventionKind::SeekAndTreat},
    }};
    return m;
}
inline const EnumMap<InterventionConfig::Cooperation>& cooperations() {
    static const EnumMap<InterventionConfig::Cooperation> m{{
        {"full", InterventionConfig::Cooperation::Full},
        {"primary_only", InterventionConfig::Cooperation::PrimaryOnly},
    }};
    return m;
}
inline const EnumMap<InterventionConfig::Action>& actions() {
    static const EnumMap<InterventionConfig::Action> m{{
        {"treatment", InterventionConfig::Action::Treatment},
        {"cure", InterventionConfig::Action::Cure},
    }};
    return m;
}

template <typename Enum>
void get_enum(Obj& o, const std::string& key, const EnumMap<Enum>& map, Enum& out) {
    std::string s;
    bool present = o.has(key);
    if (!present) return;
    o.get(key, s);
    out = map.parse(s, o.path() + "." + key);
}

// ------------------------------------------------------------------ readers

inline DesignConfig read_design(const ojson& j, const std::string& path);

inline InitialDesign read_initial(const ojson& j, const std::string& path) {
    InitialDesign d;
    Obj o(j, path);
    get_enum(o, "kind", initial_kinds(), d.kind);
    o.get("p", d.p);
    o.get("n", d.n);
    o.get("center", d.center);
    o.get("radius", d.radius);
    o.done();
    return d;
}

inline DesignConfig read_design(const ojson& j, const std::string& path) {
    DesignConfig d;
    Obj o(j, path);
    o.get("name", d.name);
    get_enum(o, "kind", design_kinds(), d.kind);
    if (const ojson* init = o.sub("initial")) d.initial = read_initial(*init, path + ".initial");
    o.get("p", d.p);
    o.get("n", d.n);
    o.get("center", d.center);
    o.get("radius", d.radius);
    o.get("follow_p", d.follow_p);
    o.get("random_supplement_p", d.random_supplement_p);
    o.get("n_links", d.n_links);
    o.get("target_size", d.target_size);
    o.get("replacement", d.replacement);
    o.get("replacement_recovery_days", d.replacement_recovery_days);
    if (const ojson* rem = o.sub("removal")) {
        Obj r(*rem, path + ".removal");
        get_enum(r, "rule", removal_kinds(), d.removal.kind);
        r.get("base_q", d.removal.base_q);
        r.get("time_in_sample_factor", d.removal.time_in_sample_factor);
        r.done();
    }
    o.get("jump_p", d.jump_p);
    o.get("rescue_jump_p", d.rescue_jump_p);
    o.get("coupons", d.coupons);
    o.done();
    return d;
}

inline InterventionConfig read_intervention(const ojson& j, const std::string& path) {
    InterventionConfig iv;
    Obj o(j, path);
    get_enum(o, "kind", intervention_kinds(), iv.kind);
    o.get("start_step", iv.start_step);
    o.get("adoption_fraction", iv.adoption_fraction);
    o.get("assortativity", iv.assortativity);
    o.get("duration_days", iv.duration_days);
    o.get("safer_sex_multiplier", iv.safer_sex_multiplier);
    get_enum(o, "cooperation", cooperations(), iv.cooperation);
    o.get("resistance", iv.resistance);
    o.get("transmission_multiplier", iv.transmission_multiplier);
    o.get("mortality_multiplier", iv.mortality_multiplier);
    get_enum(o, "action", actions(), iv.action);
    o.get("positive_boost", iv.positive_boost);
    o.get("negative_removal_q", iv.negative_removal_q);
    if (const ojson* d = o.sub("design")) iv.design = read_design(*d, path + ".design");
    o.done();
    return iv;
}

inline SimConfig read_sim_config(const ojson& j, const std::string& path) {
    SimConfig cfg;
    Obj o(j, path);
    o.has("schema_version"); // consumed by the caller
    o.get("k_groups", cfg.k_groups);
    o.get("n_target", cfg.n_target);
    o.get("horizon", cfg.horizon);
    o.get("time_step_days", cfg.time_step_days);
    o.get("rng_seed", cfg.rng_seed);

    if (const ojson* d = o.sub("demography")) {
        Obj r(*d, path + ".demography");
        r.get("mortality_per_year", cfg.demography.mortality_per_year);
        r.get("mortality_per_day", cfg.demography.mortality_per_day);
        r.get("insertion_responsiveness", cfg.demography.insertion_responsiveness);
        r.get("male_fraction", cfg.demography.male_fraction);
        r.done();
    }
    if (const ojson* sp = o.sub("spatial")) {
        Obj r(*sp, path + ".spatial");
        r.get("sigma_delta", cfg.spatial.sigma_delta);
        r.get("sigma_epsilon", cfg.spatial.sigma_epsilon);
        r.get("sigma_offset", cfg.spatial.sigma_offset);
        r.get("phi1", cfg.spatial.phi1);
        r.get("phi2", cfg.spatial.phi2);
        if (const ojson* gs = r.sub("group_size")) {
            Obj g(*gs, path + ".spatial.group_size");
            get_enum(g, "distribution", group_size_kinds(), cfg.spatial.group_size.kind);
            g.get("lambda", cfg.spatial.group_size.lambda);
            g.get("mean_log", cfg.spatial.group_size.mean_log);
            g.get("sd_log", cfg.spatial.group_size.sd_log);
            g.done();
        }
        r.done();
    }
    if (const ojson* n = o.sub("network")) {
        Obj r(*n, path + ".network");
        get_enum(r, "kernel", kernel_kinds(), cfg.network.kernel);
        r.get("amplitude", cfg.network.amplitude);
        r.get("spread", cfg.network.spread);
        r.get("reach_multiple", cfg.network.reach_multiple);
        r.get("logistic_shape", cfg.network.logistic_shape);
        if (const ojson* dp = r.sub("degree_policy")) {
            Obj g(*dp, path + ".network.degree_policy");
            get_enum(g, "type", degree_policy_kinds(), cfg.network.degree_policy.kind);
            g.get("max_degree", cfg.network.degree_policy.max_degree);
            g.get("residual", cfg.network.degree_policy.residual);
            g.get("exponent", cfg.network.degree_policy.exponent);
            g.get("norm", cfg.network.degree_policy.norm);
            g.done();
        }
        r.get("component_modifier", cfg.network.component_modifier);
        r.get("opposite_sex_only", cfg.network.opposite_sex_only);
        r.get("edge_end_hazard_per_day", cfg.network.edge_end_hazard_per_day);
        r.done();
    }
    if (const ojson* e = o.sub("epidemic")) {
        Obj r(*e, path + ".epidemic");
        r.get("enabled", cfg.epidemic.enabled);
        r.get("seed_step", cfg.epidemic.seed_step);
        r.get("contact_prob_per_day", cfg.epidemic.contact_prob_per_day);
        r.get("early_mean_days", cfg.epidemic.early_mean_days);
        get_enum(r, "early_model", early_models(), cfg.epidemic.early_model);
        r.get("weibull_shape", cfg.epidemic.weibull_shape);
        r.get("gud_multiplier", cfg.epidemic.gud_multiplier);
        r.get("gud_prevalence", cfg.epidemic.gud_prevalence);
        r.get("treatment_transmission_multiplier",
              cfg.epidemic.treatment_transmission_multiplier);
        r.get("treatment_mortality_multiplier",
              cfg.epidemic.treatment_mortality_multiplier);
        r.get("tradeoff_gamma", cfg.epidemic.tradeoff_gamma);
        r.get("calibration_beta", cfg.epidemic.calibration_beta);
        r.get("calibration_alpha", cfg.epidemic.calibration_alpha);
        r.get("tradeoff_a", cfg.epidemic.tradeoff_a);
        if (const ojson* ev = r.sub("evolution")) {
            Obj g(*ev, path + ".epidemic.evolution");
            g.get("enabled", cfg.epidemic.evolution.enabled);
            g.get("delta", cfg.epidemic.evolution.delta);
            get_enum(g, "increment", increments(), cfg.epidemic.evolution.increment);
            g.done();
        }
        if (const ojson* ls = r.sub("late_stage")) {
            Obj g(*ls, path + ".epidemic.late_stage");
            g.get("enabled", cfg.epidemic.late_stage.enabled);
            g.get("factor", cfg.epidemic.late_stage.factor);
            g.get("chronic_mean_days", cfg.epidemic.late_stage.chronic_mean_days);
            g.done();
        }
        if (const ojson* st = r.sub("strains")) {
            require(st->is_array(), path + ".epidemic.strains", "expected an array");
            cfg.epidemic.strains.clear();
            for (std::size_t i = 0; i < st->size(); ++i) {
                const std::string sp = path + ".epidemic.strains[" + std::to_string(i) + "]";
                Obj g((*st)[i], sp);
                StrainConfig sc;
                g.get("chronic_rate", sc.chronic_rate);
                g.get("early_factor", sc.early_factor);
                g.get("seed_count", sc.seed_count);
                g.get("random_factor", sc.random_factor);
                g.get("factor_min", sc.factor_min);
                g.get("factor_max", sc.factor_max);
                g.done();
                cfg.epidemic.strains.push_back(sc);
            }
        }
        r.done();
    }
    if (const ojson* ds = o.sub("designs")) {
        require(ds->is_array(), path + ".designs", "expected an array");
        for (std::size_t i = 0; i < ds->size(); ++i)
            cfg.designs.push_back(
                read_design((*ds)[i], path + ".designs[" + std::to_string(i) + "]"));
    }
    if (const ojson* ivs = o.sub("interventions")) {
        require(ivs->is_array(), path + ".interventions", "expected an array");
        for (std::size_t i = 0; i < ivs->size(); ++i)
            cfg.interventions.push_back(read_intervention(
                (*ivs)[i], path + ".interventions[" + std::to_string(i) + "]"));
    }
    if (const ojson* dg = o.sub("diagnostics")) {
        Obj r(*dg, path + ".diagnostics");
        if (const ojson* ecf = r.sub("ecf")) {
            Obj g(*ecf, path + ".diagnostics.ecf");
            g.get("series", cfg.diagnostics.ecf.series);
            g.get("grid_points", cfg.diagnostics.ecf.grid_points);
            g.get("a_max", cfg.diagnostics.ecf.a_max);
            g.get("auto_window", cfg.diagnostics.ecf.auto_window);
            g.done();
        }
        r.get("histogram_bins", cfg.diagnostics.histogram_bins);
        r.get("histogram_min", cfg.diagnostics.histogram_min);
        r.get("histogram_max", cfg.diagnostics.histogram_max);
        if (const ojson* cp = r.sub("checkpoints")) {
            require(cp->is_array(), path + ".diagnostics.checkpoints", "expected an array");
            for (const auto& v : *cp) {
                require(v.is_number_integer(), path + ".diagnostics.checkpoints",
                        "expected integers");
                cfg.diagnostics.checkpoints.push_back(v.get<Step>());
            }
        }
        r.get("recency_days", cfg.diagnostics.recency_days);
        if (const ojson* w = r.sub("equilibrium_window")) {
            require(w->is_array() && w->size() == 2 && (*w)[0].is_number_integer() &&
                        (*w)[1].is_number_integer(),
                    path + ".diagnostics.equilibrium_window", "expected [first, last]");
            cfg.diagnostics.equilibrium_window =
                std::make_pair((*w)[0].get<Step>(), (*w)[1].get<Step>());
        }
        r.done();
    }
    o.done();
    return cfg;
}

// ------------------------------------------------------------------ writers

inline ojson write_initial(const InitialDesign& d) {
    ojson j;
    j["kind"] = initial_kinds().name(d.kind);
    j["p"] = d.p;
    j["n"] = d.n;
    j["center"] = {d.center.x, d.center.y};
    j["radius"] = d.radius;
    return j;
}

inline ojson write_design(const DesignConfig& d) {
    ojson j;
    j["name"] = d.name;
    j["kind"] = design_kinds().name(d.kind);
    j["initial"] = write_initial(d.initial);
    j["p"] = d.p;
    j["n"] = d.n;
    j["center"] = {d.center.x, d.center.y};
    j["radius"] = d.radius;
    j["follow_p"] = d.follow_p;
    j["random_supplement_p"] = d.random_supplement_p;
    j["n_links"] = d.n_links;
    j["target_size"] = d.target_size;
    j["replacement"] = d.replacement;
    j["replacement_recovery_days"] = d.replacement_recovery_days;
    j["removal"] = {{"rule", removal_kinds().name(d.removal.kind)},
                    {"base_q", d.removal.base_q},
                    {"time_in_sample_factor", d.removal.time_in_sample_factor}};
    j["jump_p"] = d.jump_p;
    j["rescue_jump_p"] = d.rescue_jump_p;
    j["coupons"] = d.coupons;
    return j;
}

inline ojson write_intervention(const InterventionConfig& iv) {
    ojson j;
    j["kind"] = intervention_kinds().name(iv.kind);
    j["start_step"] = iv.start_step;
    j["adoption_fraction"] = iv.adoption_fraction;
    j["assortativity"] = iv.assortativity;
    j["duration_days"] = iv.duration_days;
    j["safer_sex_multiplier"] = iv.safer_sex_multiplier;
    j["cooperation"] = cooperations().name(iv.cooperation);
    j["resistance"] = iv.resistance;
    j["transmission_multiplier"] = iv.transmission_multiplier;
    j["mortality_multiplier"] = iv.mortality_multiplier;
    j["action"] = actions().name(iv.action);
    j["positive_boost"] = iv.positive_boost;
    j["negative_removal_q"] = iv.negative_removal_q;
    if (iv.design) j["design"] = write_design(*iv.design);
    return j;
}

inline ojson write_sim_config(const SimConfig& cfg) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["k_groups"] = cfg.k_groups;
    j["n_target"] = cfg.n_target;
    j["horizon"] = cfg.horizon;
    j["time_step_days"] = cfg.time_step_days;
    j["rng_seed"] = cfg.rng_seed;
    j["demography"] = {{"mortality_per_year", cfg.demography.mortality_per_year},
                       {"mortality_per_day", cfg.demography.mortality_per_day},
                       {"insertion_responsiveness", cfg.demography.insertion_responsiveness},
                       {"male_fraction", cfg.demography.male_fraction}};
    j["spatial"] = {{"sigma_delta", cfg.spatial.sigma_delta},
                    {"sigma_epsilon", cfg.spatial.sigma_epsilon},
                    {"sigma_offset", cfg.spatial.sigma_offset},
                    {"phi1", cfg.spatial.phi1},
                    {"phi2", cfg.spatial.phi2},
                    {"group_size",
                     {{"distribution", group_size_kinds().name(cfg.spatial.group_size.kind)},
                      {"lambda", cfg.spatial.group_size.lambda},
                      {"mean_log", cfg.spatial.group_size.mean_log},
                      {"sd_log", cfg.spatial.group_size.sd_log}}}};
    j["network"] = {
        {"kernel", kernel_kinds().name(cfg.network.kernel)},
        {"amplitude", cfg.network.amplitude},
        {"spread", cfg.network.spread},
        {"reach_multiple", cfg.network.reach_multiple},
        {"logistic_shape", cfg.network.logistic_shape},
        {"degree_policy",
         {{"type", degree_policy_kinds().name(cfg.network.degree_policy.kind)},
          {"max_degree", cfg.network.degree_policy.max_degree},
          {"residual", cfg.network.degree_policy.residual},
          {"exponent", cfg.network.degree_policy.exponent},
          {"norm", cfg.network.degree_policy.norm}}},
        {"component_modifier", cfg.network.component_modifier},
        {"opposite_sex_only", cfg.network.opposite_sex_only},
        {"edge_end_hazard_per_day", cfg.network.edge_end_hazard_per_day}};
    ojson strains = ojson::array();
    for (const auto& s : cfg.epidemic.strains)
        strains.push_back({{"chronic_rate", s.chronic_rate},
                           {"early_factor", s.early_factor},
                           {"seed_count", s.seed_count},
                           {"random_factor", s.random_factor},
                           {"factor_min", s.factor_min},
                           {"factor_max", s.factor_max}});
    j["epidemic"] = {
        {"enabled", cfg.epidemic.enabled},
        {"seed_step", cfg.epidemic.seed_step},
        {"contact_prob_per_day", cfg.epidemic.contact_prob_per_day},
        {"early_mean_days", cfg.epidemic.early_mean_days},
        {"early_model", early_models().name(cfg.epidemic.early_model)},
        {"weibull_shape", cfg.epidemic.weibull_shape},
        {"gud_multiplier", cfg.epidemic.gud_multiplier},
        {"gud_prevalence", cfg.epidemic.gud_prevalence},
        {"treatment_transmission_multiplier", cfg.epidemic.treatment_transmission_multiplier},
        {"treatment_mortality_multiplier", cfg.epidemic.treatment_mortality_multiplier},
        {"tradeoff_gamma", cfg.epidemic.tradeoff_gamma},
        {"calibration_beta", cfg.epidemic.calibration_beta},
        {"calibration_alpha", cfg.epidemic.calibration_alpha},
        {"tradeoff_a", cfg.epidemic.tradeoff_a},
        {"evolution",
         {{"enabled", cfg.epidemic.evolution.enabled},
          {"delta", cfg.epidemic.evolution.delta},
          {"increment", increments().name(cfg.epidemic.evolution.increment)}}},
        {"late_stage",
         {{"enabled", cfg.epidemic.late_stage.enabled},
          {"factor", cfg.epidemic.late_stage.factor},
          {"chronic_mean_days", cfg.epidemic.late_stage.chronic_mean_days}}},
        {"strains", strains}};
    ojson designs = ojson::array();
    for (const auto& d : cfg.designs) designs.push_back(write_design(d));
    j["designs"] = designs;
    ojson ivs = ojson::array();
    for (const auto& iv : cfg.interventions) ivs.push_back(write_intervention(iv));
    j["interventions"] = ivs;
    ojson diag;
    diag["ecf"] = {{"series", cfg.diagnostics.ecf.series},
                   {"grid_points", cfg.diagnostics.ecf.grid_points},
                   {"a_max", cfg.diagnostics.ecf.a_max},
                   {"auto_window", cfg.diagnostics.ecf.auto_window}};
    diag["histogram_bins"] = cfg.diagnostics.histogram_bins;
    diag["histogram_min"] = cfg.diagnostics.histogram_min;
    diag["histogram_max"] = cfg.diagnostics.histogram_max;
    diag["checkpoints"] = cfg.diagnostics.checkpoints;
    diag["recency_days"] = cfg.diagnostics.recency_days;
    if (cfg.diagnostics.equilibrium_window)
        diag["equilibrium_window"] = {cfg.diagnostics.equilibrium_window->first,
                                      cfg.diagnostics.equilibrium_window->second};
    j["diagnostics"] = diag;
    return j;
}

} // namespace cfgjson

// ------------------------------------------------------------------- facade

/// Scenario names declared by a config document (empty if none).
inline std::vector<std::string> config_scenarios(const std::string& text) {
    const ojson root = cfgjson::parse_document(text);
    std::vector<std::string> names;
    if (root.is_object() && root.contains("scenarios"))
        for (auto it = root.at("scenarios").begin(); it != root.at("scenarios").end(); ++it)
            names.push_back(it.key());
    return names;
}

/** Parse a config document.  Top-level fields form the base scenario; a
 * "scenarios" object holds named partial overrides merged over the base
 * (JSON merge-patch).  The result is resolved and validated.
 */
inline SimConfig parse_config(const std::string& text, const std::string& scenario = "") {
    ojson root = cfgjson::parse_document(text);
    require(root.is_object(), "config", "expected a JSON object");
    require(root.contains("schema_version"), "schema_version", "missing");
    require(root.at("schema_version").is_number_integer() &&
                root.at("schema_version").get<int>() == kSchemaVersion,
            "schema_version",
            "expected " + std::to_string(kSchemaVersion) + ", got " +
                root.at("schema_version").dump());

    ojson scenarios = ojson::object();
    if (root.contains("scenarios")) {
        scenarios = root.at("scenarios");
        require(scenarios.is_object(), "scenarios", "expected an object");
        root.erase("scenarios");
    }
    ojson merged = root;
    if (!scenario.empty()) {
        require(scenarios.contains(scenario), "scenarios",
                "no scenario named '" + scenario + "'");
        merged.merge_patch(scenarios.at(scenario));
    }
    SimConfig cfg = cfgjson::read_sim_config(merged, "config");
    cfg.resolve();
    cfg.validate();
    return cfg;
}

/// Fully resolved config document; re-parsing yields the identical SimConfig.
inline std::string emit_config(const SimConfig& cfg) {
    return cfgjson::write_sim_config(cfg).dump(2) + "\n";
}

} // namespace driftnet
