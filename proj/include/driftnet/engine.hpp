#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <thread>
#include <vector>

#include "driftnet/config.hpp"
#include "driftnet/diagnostics.hpp"
#include "driftnet/epidemic.hpp"
#include "driftnet/interventions.hpp"
#include "driftnet/network.hpp"
#include "driftnet/population.hpp"
#include "driftnet/rng.hpp"
#include "driftnet/sampling.hpp"
#include "driftnet/spatial.hpp"

namespace driftnet {

struct SampleRuntime {
    SampleState state;
    int intervention = -1; // index into cfg.interventions; -1 = standalone design
};

/// Event counts for one simulation day.
struct StepReport {
    Step t = 0;
    std::int64_t deaths_background = 0;
    std::int64_t deaths_disease = 0;
    std::int64_t births = 0;
    std::int64_t edges_dissolved = 0;
    std::int64_t edges_formed = 0;
    std::int64_t edges_dropped_death = 0;
    std::int64_t contacts = 0;
    std::int64_t transmissions = 0;
    std::int64_t to_chronic = 0;
    std::int64_t to_late = 0;
    std::vector<std::int64_t> sample_added;
    std::vector<std::int64_t> sample_removed;
    InterventionTally tally;
};

/** Full state of a run at time t: the population graph, the drifting groups,
 * every design's sample, the diagnostics accumulators, and the RNG stream.
 */
struct SimState {
    SimConfig cfg;
    Step t = 0;
    Population pop;
    std::vector<Group> groups;
    std::vector<SampleRuntime> samples;
    Rng rng;
    std::uint64_t strain_serial = 0;

    EcfAccumulator ecf;
    CumulativeTracker cum;
    std::int64_t transmissions_cum = 0;
    std::int64_t tests_cum = 0;
    std::int64_t cures_cum = 0;
    std::int64_t treatments_cum = 0;
    std::int64_t vaccinations_cum = 0;
    std::int64_t adopter_incidence_cum = 0;
    std::int64_t nonadopter_incidence_cum = 0;
    std::vector<std::string> event_log;

    int pair_intervention = -1; // cached index of the pair strategy, if any

    const InterventionConfig* pair_cfg() const {
        return pair_intervention >= 0 ? &cfg.interventions[pair_intervention] : nullptr;
    }
    double safer_sex_multiplier() const {
        const auto* p = pair_cfg();
        return p ? p->safer_sex_multiplier : 1.0;
    }
    bool pair_active() const {
        const auto* p = pair_cfg();
        return p != nullptr && t >= p->start_step;
    }
};

namespace detail {

inline void wire_cached_config(SimState& s) {
    s.pair_intervention = -1;
    for (std::size_t i = 0; i < s.cfg.interventions.size(); ++i)
        if (s.cfg.interventions[i].kind == InterventionKind::PairSaferSexTest)
            s.pair_intervention = static_cast<int>(i);
}

// Node construction consumes RNG in a fixed order: sex, offsets, GUD,
// adopter flag.  Used both at init and for per-step insertions.
inline Node make_node(SimState& s, int group, Step born_at) {
    const SimConfig& cfg = s.cfg;
    Node n;
    n.sex = s.rng.bernoulli(cfg.demography.male_fraction) ? Sex::Male : Sex::Female;
    n.group = group;
    init_offset(n, cfg.spatial, s.rng);
    n.pos = s.groups[group].center + n.offset;
    n.born_at = born_at;
    n.amplitude = cfg.network.amplitude;
    n.spread = cfg.network.spread;
    n.end_hazard = cfg.network.edge_end_hazard_per_day;
    n.contact_prob = cfg.epidemic.contact_prob_per_day;
    n.gud = s.rng.bernoulli(cfg.epidemic.gud_prevalence);
    const auto* pair = s.pair_cfg();
    n.adopter = pair != nullptr && s.rng.bernoulli(pair->adoption_fraction);
    return n;
}

inline std::vector<std::string> design_names(const SimConfig& cfg) {
    std::vector<std::string> names;
    for (const auto& d : cfg.designs) names.push_back(d.name);
    for (const auto& iv : cfg.interventions)
        if (iv.design) names.push_back(iv.design->name);
    return names;
}

} // namespace detail

/** Assemble the t = 0 state: groups uniform on the region, nodes drawn per
 * group, zero edges, seed infections, and every design's initial sample.
 */
inline SimState init_simulation(SimConfig cfg) {
    cfg.resolve();
    cfg.validate();
    {
        std::set<std::string> seen;
        for (const auto& name : detail::design_names(cfg))
            require(seen.insert(name).second, "designs",
                    "duplicate design name '" + name + "'");
    }

    SimState s;
    s.cfg = std::move(cfg);
    s.rng = Rng(s.cfg.rng_seed);
    detail::wire_cached_config(s);

    s.groups = init_groups(s.cfg.k_groups, s.cfg.spatial.sigma_delta, s.rng);
    for (auto& g : s.groups) {
        const auto& gs = s.cfg.spatial.group_size;
        g.lambda = gs.kind == GroupSizeConfig::Kind::Fixed
                       ? gs.lambda
                       : s.rng.lognormal(gs.mean_log, gs.sd_log);
        g.target_size = g.lambda;
        const std::int64_t count = s.rng.poisson(g.lambda);
        for (std::int64_t i = 0; i < count; ++i)
            s.pop.add_node(detail::make_node(s, g.id, 0));
    }

    if (s.cfg.epidemic.enabled && s.cfg.epidemic.seed_step == 0)
        seed_infections(s.pop, s.cfg.epidemic, 0, s.rng, s.strain_serial);

    for (const auto& d : s.cfg.designs)
        s.samples.push_back({init_sample(d, s.pop, s.rng), -1});
    for (std::size_t i = 0; i < s.cfg.interventions.size(); ++i)
        if (s.cfg.interventions[i].design)
            s.samples.push_back({init_sample(*s.cfg.interventions[i].design, s.pop, s.rng),
                                 static_cast<int>(i)});

    s.ecf = EcfAccumulator(s.cfg.diagnostics.ecf);
    s.cum = CumulativeTracker(s.cfg.diagnostics.histogram_bins,
                              s.cfg.diagnostics.histogram_min,
                              s.cfg.diagnostics.histogram_max);
    return s;
}

inline double monitored_value(const SimState& s, const StepReport& report) {
    const std::string& name = s.cfg.diagnostics.ecf.series;
    const auto n = static_cast<double>(s.pop.size());
    if (name == "prevalence")
        return n > 0.0 ? static_cast<double>(s.pop.infected_count()) / n : 0.0;
    if (name == "population") return n;
    if (name == "infected") return static_cast<double>(s.pop.infected_count());
    if (name == "edges") return static_cast<double>(s.pop.edges.size());
    if (name == "mean_degree")
        return n > 0.0 ? 2.0 * static_cast<double>(s.pop.edges.size()) / n : 0.0;
    if (name == "incidence") return static_cast<double>(report.transmissions);
    throw ConfigError("diagnostics.ecf.series", "unknown series '" + name + "'");
}

/** Advance one day.  Fixed phase order (a reorder is a breaking change,
 * guarded by the golden-sequence test):
 *   1 group-center drift      5 link dissolution       9 sampling designs
 *   2 node offsets            6 link formation        10 interventions
 *   3 deaths                  7 contact/transmission  11 diagnostics
 *   4 insertions              8 stage progression
 */
inline StepReport step_simulation(SimState& s) {
    const SimConfig& cfg = s.cfg;
    s.t += 1;
    const Step t = s.t;
    StepReport report;
    report.t = t;

    // 1. group centers
    for (auto& g : s.groups)
        step_group_center(g, cfg.spatial.sigma_delta, cfg.spatial.sigma_epsilon, s.rng);

    // 2. node offsets
    for (auto& n : s.pop.nodes) {
        step_node_offset(n, cfg.spatial, s.rng);
        n.pos = s.groups[n.group].center + n.offset;
    }

    // 3+4. deaths (background + disease surcharge), then insertions toward
    // the population target; dead nodes leave every sample
    {
        const TradeoffParams tradeoff = cfg.epidemic.tradeoff();
        const RegulationEvents ev = regulate_population(
            s.pop, s.groups, cfg.n_target, cfg.demography, t, s.rng,
            [&](const Node& n) { return disease_hazard(n, cfg.epidemic, tradeoff); },
            [&](int group) { return detail::make_node(s, group, t); });
        report.deaths_background = ev.deaths_background;
        report.deaths_disease = ev.deaths_disease;
        report.births = ev.births;
        report.edges_dropped_death = ev.edges_dropped;
        for (auto& sr : s.samples) purge_dead(sr.state, ev.dead, t);
    }

    // 5+6. link dissolution, then formation over grid candidates
    {
        const auto* pair = s.pair_cfg();
        const double w = pair ? pair->assortativity : 0.0;
        const bool assort_on = s.pair_active();
        EdgeEvents ev = form_and_dissolve_links(s.pop, cfg.network, t, s.rng, w, assort_on);
        report.edges_dissolved = static_cast<std::int64_t>(ev.dissolved.size());
        report.edges_formed = static_cast<std::int64_t>(ev.formed.size());
        if (assort_on)
            for (const EdgeKey& key : ev.formed)
                activate_pair_protocol(s.pop.edges.at(key), s.pop.at(key.a),
                                       s.pop.at(key.b), pair->cooperation);
    }

    // 7. the virus' link tracing; delayed seeds enter a formed network here
    if (cfg.epidemic.enabled && t == cfg.epidemic.seed_step)
        seed_infections(s.pop, cfg.epidemic, t, s.rng, s.strain_serial);
    if (cfg.epidemic.enabled) {
        TransmitEvents ev = contact_and_transmit_step(
            s.pop, cfg.epidemic, t, s.rng, s.safer_sex_multiplier(), s.strain_serial);
        report.contacts = ev.contacts;
        report.transmissions = static_cast<std::int64_t>(ev.infected.size());
        s.transmissions_cum += report.transmissions;
        for (NodeId id : ev.infected) {
            if (s.pop.at(id).adopter)
                ++s.adopter_incidence_cum;
            else
                ++s.nonadopter_incidence_cum;
        }
    }

    // 8. stage progression
    if (cfg.epidemic.enabled) {
        const StageEvents ev = progress_stages(s.pop, cfg.epidemic, t, s.rng);
        report.to_chronic = ev.to_chronic;
        report.to_late = ev.to_late;
    }

    // 9. each design's selection/removal step, in config order; an
    // intervention's design sleeps until its start step
    report.sample_added.assign(s.samples.size(), 0);
    report.sample_removed.assign(s.samples.size(), 0);
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        SampleRuntime& sr = s.samples[i];
        LinkProbFn p_fn;
        std::function<double(NodeId, const MemberInfo&)> extra_q;
        if (sr.intervention >= 0) {
            const InterventionConfig& iv = cfg.interventions[sr.intervention];
            if (t < iv.start_step) continue;
            if (iv.kind == InterventionKind::SeekAndTreat) {
                p_fn = seek_and_treat_p_fn(iv, sr.state);
                extra_q = seek_and_treat_extra_q(iv);
            }
        }
        const SampleStepEvents ev = step_design(sr.state, s.pop, t, s.rng, p_fn, extra_q);
        report.sample_added[i] = static_cast<std::int64_t>(ev.added.size());
        report.sample_removed[i] = static_cast<std::int64_t>(ev.removed.size());
    }

    // 10. interventions on untested sample members, then pair-strategy tests
    for (auto& sr : s.samples) {
        if (sr.intervention < 0) continue;
        const InterventionConfig& iv = cfg.interventions[sr.intervention];
        if (t < iv.start_step) continue;
        apply_to_new_members(iv, sr.state, s.pop, t, report.tally, &s.event_log);
    }
    if (s.pair_active()) {
        const auto* pair = s.pair_cfg();
        for (auto& [key, st] : s.pop.edges)
            if (pair_strategy_update(st, s.pop.at(key.a), s.pop.at(key.b), t,
                                     pair->duration_days))
                report.tally.pair_tests += 2;
    }
    s.tests_cum += report.tally.tests + report.tally.pair_tests;
    s.cures_cum += report.tally.cures;
    s.treatments_cum += report.tally.treatments;
    s.vaccinations_cum += report.tally.vaccinations;

    // 11. diagnostics recording
    {
        const double x = monitored_value(s, report);
        s.ecf.update(x);
        s.cum.update(x);
    }
    return report;
}

/// Row of the output series for the state just after a step.
inline Row make_row(const SimState& s, const StepReport& report) {
    Row r;
    r.step = s.t;
    r.population = static_cast<std::int64_t>(s.pop.size());
    r.births = report.births;
    r.deaths_background = report.deaths_background;
    r.deaths_disease = report.deaths_disease;
    r.edges = static_cast<std::int64_t>(s.pop.edges.size());
    r.edges_formed = report.edges_formed;
    r.edges_dissolved = report.edges_dissolved;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.mean_degree = r.population > 0
                        ? 2.0 * static_cast<double>(r.edges) /
                              static_cast<double>(r.population)
                        : nan;

    r.strain_counts.assign(s.cfg.epidemic.strains.size(), 0);
    double factor_sum = 0.0;
    for (const auto& n : s.pop.nodes) {
        if (n.resistance >= 1.0) ++r.immune_count;
        if (n.adopter) ++r.adopters;
        if (!n.infection) continue;
        ++r.infected;
        switch (n.infection->stage) {
        case Stage::Early: ++r.early_count; break;
        case Stage::Chronic: ++r.chronic_count; break;
        case Stage::Late: ++r.late_count; break;
        }
        if (n.infection->treated) ++r.treated_count;
        const int fam = n.infection->strain.family;
        if (fam >= 0 && static_cast<std::size_t>(fam) < r.strain_counts.size())
            ++r.strain_counts[fam];
        factor_sum += n.infection->strain.early_factor();
    }
    r.prevalence = r.population > 0 ? static_cast<double>(r.infected) /
                                          static_cast<double>(r.population)
                                    : 0.0;
    r.incidence = report.transmissions;
    r.mean_early_factor =
        r.infected > 0 ? factor_sum / static_cast<double>(r.infected) : nan;
    r.monitored_cum_mean = s.cum.mean();

    const StrataMeans strata =
        infection_degree_comparison(s.pop, s.t, s.cfg.diagnostics.recency_days);
    auto opt = [&](const std::optional<double>& v) { return v ? *v : nan; };
    r.degree_recent = opt(strata.degree_recent);
    r.degree_longer = opt(strata.degree_longer);
    r.degree_never = opt(strata.degree_never);
    r.outdegree_recent = opt(strata.outdegree_recent);
    r.outdegree_longer = opt(strata.outdegree_longer);
    r.outdegree_never = opt(strata.outdegree_never);

    r.tests_cum = s.tests_cum;
    r.cures_cum = s.cures_cum;
    r.treatments_cum = s.treatments_cum;
    r.vaccinations_cum = s.vaccinations_cum;
    r.adopter_incidence_cum = s.adopter_incidence_cum;
    r.nonadopter_incidence_cum = s.nonadopter_incidence_cum;

    for (const auto& sr : s.samples) {
        r.sample_sizes.push_back(static_cast<std::int64_t>(sr.state.members.size()));
    }
    r.sample_added = report.sample_added;
    r.sample_removed = report.sample_removed;
    return r;
}

inline std::vector<Step> checkpoint_steps(const SimConfig& cfg) {
    std::vector<Step> cp = cfg.diagnostics.checkpoints;
    if (cp.empty())
        for (Step c = 64; c < cfg.horizon; c *= 2) cp.push_back(c);
    cp.push_back(cfg.horizon);
    std::sort(cp.begin(), cp.end());
    cp.erase(std::unique(cp.begin(), cp.end()), cp.end());
    return cp;
}

using StepObserver = std::function<void(const SimState&, const StepReport&)>;

/// Run from the state's current time to the horizon, collecting outputs.
/// A resumed state (t > 0) yields rows for the remaining steps only.
inline RunOutput run_to_horizon(SimState& s, const StepObserver& observer = {}) {
    RunOutput out;
    out.config = s.cfg;
    out.design_names = detail::design_names(s.cfg);
    const auto checkpoints = checkpoint_steps(s.cfg);
    std::vector<std::complex<double>> prev_ecf;

    while (s.t < s.cfg.horizon) {
        const StepReport report = step_simulation(s);
        out.rows.push_back(make_row(s, report));
        if (observer) observer(s, report);
        if (std::binary_search(checkpoints.begin(), checkpoints.end(), s.t)) {
            s.ecf.finalize();
            EcfSnapshot snap;
            snap.t = s.t;
            snap.grid = s.ecf.grid();
            snap.values = s.ecf.eval();
            snap.tail_dispersion = ecf_tail_dispersion(prev_ecf, snap.values);
            prev_ecf = snap.values;
            out.ecf.push_back(std::move(snap));
            out.histograms.push_back({s.t, s.cum.histogram()});
        }
    }
    out.event_log = s.event_log;
    return out;
}

inline RunOutput run_simulation(const SimConfig& cfg, const StepObserver& observer = {}) {
    SimState s = init_simulation(cfg);
    return run_to_horizon(s, observer);
}

/** n_reps independent runs seeded seed_base + i.  Replicates may execute on
 * worker threads; outputs are identical to sequential execution because each
 * run owns its state, RNG, and output slot.
 */
inline std::vector<RunOutput> run_replicates(const SimConfig& cfg, int n_reps,
                                             std::uint64_t seed_base, int jobs = 1) {
    require(n_reps >= 1, "replicates.n_reps", "must be >= 1");
    std::vector<RunOutput> outputs(static_cast<std::size_t>(n_reps));
    auto run_one = [&](int i) {
        SimConfig c = cfg;
        c.rng_seed = seed_base + static_cast<std::uint64_t>(i);
        outputs[static_cast<std::size_t>(i)] = run_simulation(c);
    };
    jobs = std::max(1, std::min(jobs, n_reps));
    if (jobs == 1) {
        for (int i = 0; i < n_reps; ++i) run_one(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < n_reps; i = next.fetch_add(1))
                    run_one(i);
            });
        for (auto& th : pool) th.join();
    }
    return outputs;
}

/// Referential integrity: edges and samples refer only to live nodes.
inline bool check_state_integrity(const SimState& s) {
    if (!s.pop.check_integrity()) return false;
    for (const auto& sr : s.samples)
        for (const auto& [id, info] : sr.state.members)
            if (!s.pop.find(id)) return false;
    return true;
}

} // namespace driftnet
