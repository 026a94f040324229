#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "driftnet/common.hpp"
#include "driftnet/hazards.hpp"

namespace driftnet {

constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------- demography

struct DemographyConfig {
    double mortality_per_year = 0.02; // background, converted to daily at resolve()
    double mortality_per_day = 0.0;   // resolved; may also be set directly
    double insertion_responsiveness = 1.0; // rho in (0,1]; 0 disables insertions
    double male_fraction = 0.5;

    void validate() const {
        require(mortality_per_year >= 0.0 && mortality_per_year <= 1.0,
                "demography.mortality_per_year", "probability out of range [0,1]");
        require(mortality_per_day >= 0.0 && mortality_per_day <= 1.0,
                "demography.mortality_per_day", "probability out of range [0,1]");
        require(insertion_responsiveness >= 0.0 && insertion_responsiveness <= 1.0,
                "demography.insertion_responsiveness", "must be in [0,1]");
        require(male_fraction >= 0.0 && male_fraction <= 1.0,
                "demography.male_fraction", "probability out of range [0,1]");
    }
};

// ------------------------------------------------------------------- spatial

struct GroupSizeConfig {
    enum class Kind { Fixed, Lognormal };
    Kind kind = Kind::Fixed;
    double lambda = -1.0;  // Fixed: Poisson mean per group; negative = n_target/k_groups
    double mean_log = 3.0; // Lognormal draw of the per-group mean
    double sd_log = 0.8;
};

struct SpatialConfig {
    double sigma_delta = 0.005;   // stationary sd of group displacement per axis
    double sigma_epsilon = 0.002; // proposal sd of the displacement increment
    double sigma_offset = 0.05;   // stationary sd of node offsets around the center
    double phi1 = 0.5;            // AR(2) coefficients for node offsets
    double phi2 = 0.2;
    GroupSizeConfig group_size;

    void validate() const {
        require(sigma_delta >= 0.0, "spatial.sigma_delta", "must be >= 0");
        require(sigma_epsilon >= 0.0, "spatial.sigma_epsilon", "must be >= 0");
        require(sigma_offset >= 0.0, "spatial.sigma_offset", "must be >= 0");
        require(phi2 > -1.0 && phi2 < 1.0 && phi1 + phi2 < 1.0 && phi2 - phi1 < 1.0,
                "spatial.phi1/phi2", "outside the AR(2) stationarity region");
        if (group_size.kind == GroupSizeConfig::Kind::Fixed)
            require(group_size.lambda >= 0.0, "spatial.group_size.lambda", "must be >= 0");
        require(group_size.sd_log >= 0.0, "spatial.group_size.sd_log", "must be >= 0");
    }

    // Innovation variance solved so the AR(2) marginal stays N(0, sigma_offset^2).
    double offset_innovation_sd() const {
        const double v = sigma_offset * sigma_offset * (1.0 + phi2) *
                         ((1.0 - phi2) * (1.0 - phi2) - phi1 * phi1) / (1.0 - phi2);
        return v > 0.0 ? std::sqrt(v) : 0.0;
    }
};

// ------------------------------------------------------------------- network

enum class KernelKind { Normal, Logistic, Disk };

enum class DegreePolicyKind { None, Compensatory, Preferential };

struct DegreePolicy {
    DegreePolicyKind kind = DegreePolicyKind::None;
    int max_degree = 1;      // compensatory: threshold at which the residual applies
    double residual = 0.0;   // compensatory: factor once at/over max_degree (kappa)
    double exponent = 0.8;   // preferential: (1+deg)^eta
    double norm = 1.0;       // preferential: divisor keeping the factor bounded
};

struct NetworkConfig {
    KernelKind kernel = KernelKind::Normal;
    double amplitude = 0.02;     // a_i in [0,1]
    double spread = 0.05;        // sigma_i > 0
    double reach_multiple = 3.0; // kernel cutoff at reach_multiple * spread
    double logistic_shape = 0.01;
    DegreePolicy degree_policy;
    double component_modifier = 1.0; // multiplier when already in the same component
    bool opposite_sex_only = true;
    double edge_end_hazard_per_day = 1.0 / 730.0; // per endpoint

    void validate() const {
        require(amplitude >= 0.0 && amplitude <= 1.0, "network.amplitude",
                "must be in [0,1]");
        require(spread > 0.0, "network.spread", "must be > 0");
        require(reach_multiple > 0.0, "network.reach_multiple", "must be > 0");
        require(logistic_shape > 0.0, "network.logistic_shape", "must be > 0");
        require(degree_policy.residual >= 0.0 && degree_policy.residual <= 1.0,
                "network.degree_policy.residual", "must be in [0,1]");
        require(degree_policy.exponent >= 0.0, "network.degree_policy.exponent",
                "must be >= 0");
        require(degree_policy.norm >= 1.0, "network.degree_policy.norm", "must be >= 1");
        require(degree_policy.max_degree >= 0, "network.degree_policy.max_degree",
                "must be >= 0");
        require(component_modifier >= 0.0, "network.component_modifier", "must be >= 0");
        require(edge_end_hazard_per_day >= 0.0 && edge_end_hazard_per_day <= 1.0,
                "network.edge_end_hazard_per_day", "probability out of range [0,1]");
    }
};

// ------------------------------------------------------------------ sampling

enum class DesignKind {
    Bernoulli,       // repeated per-step Bernoulli(p) over outside nodes
    Srswor,          // one-shot simple random sample without replacement
    WithReplacement, // one-shot n independent draws
    SpatialBernoulli,// one-shot Bernoulli restricted to a disk
    LinkTrace,       // Bernoulli tracing of out-links + random supplement
    LinkTraceFixedN, // SRSWOR of n_links out-links, shortfall filled at random
    RandomWalk,
    Rds,
};

struct InitialDesign {
    enum class Kind { None, Bernoulli, Srswor, WithReplacement, SpatialBernoulli };
    Kind kind = Kind::None;
    double p = 0.0;
    int n = 0;
    Vec2 center{0.5, 0.5};
    double radius = 0.1;
};

struct RemovalRule {
    enum class Kind { TargetSize, PerNode };
    Kind kind = Kind::TargetSize;
    double base_q = 0.0;            // PerNode: q_i = base_q + time_factor * days_in_sample
    double time_in_sample_factor = 0.0;
};

struct DesignConfig {
    std::string name;
    DesignKind kind = DesignKind::LinkTrace;
    InitialDesign initial;
    double p = 0.0;            // Bernoulli / SpatialBernoulli per-node probability
    int n = 0;                 // Srswor / WithReplacement draw count
    Vec2 center{0.5, 0.5};     // SpatialBernoulli disk
    double radius = 0.1;
    double follow_p = 0.3;     // link tracing probability per out-link
    double random_supplement_p = 0.0; // p_r
    int n_links = 0;           // LinkTraceFixedN target draw count
    int target_size = 0;       // removal target; 0 disables the target-size rule
    double replacement = 1.0;  // r in [0,1]
    double replacement_recovery_days = 0.0; // 0 keeps r constant
    RemovalRule removal;
    double jump_p = 0.0;       // RandomWalk
    double rescue_jump_p = 0.5;
    int coupons = 3;           // Rds

    void validate(const std::string& where) const {
        require(!name.empty(), where + ".name", "must be non-empty");
        require(p >= 0.0 && p <= 1.0, where + ".p", "probability out of range [0,1]");
        require(n >= 0, where + ".n", "must be >= 0");
        require(radius >= 0.0, where + ".radius", "must be >= 0");
        require(follow_p >= 0.0 && follow_p <= 1.0, where + ".follow_p",
                "probability out of range [0,1]");
        require(random_supplement_p >= 0.0 && random_supplement_p <= 1.0,
                where + ".random_supplement_p", "probability out of range [0,1]");
        require(n_links >= 0, where + ".n_links", "must be >= 0");
        require(target_size >= 0, where + ".target_size", "must be >= 0");
        require(replacement >= 0.0 && replacement <= 1.0, where + ".replacement",
                "must be in [0,1]");
        require(replacement_recovery_days >= 0.0, where + ".replacement_recovery_days",
                "must be >= 0");
        require(removal.base_q >= 0.0 && removal.base_q <= 1.0, where + ".removal.base_q",
                "probability out of range [0,1]");
        require(removal.time_in_sample_factor >= 0.0, where + ".removal.time_in_sample_factor",
                "must be >= 0");
        require(jump_p >= 0.0 && jump_p <= 1.0, where + ".jump_p",
                "probability out of range [0,1]");
        require(rescue_jump_p >= 0.0 && rescue_jump_p <= 1.0, where + ".rescue_jump_p",
                "probability out of range [0,1]");
        require(coupons >= 0, where + ".coupons", "must be >= 0");
        require(initial.p >= 0.0 && initial.p <= 1.0, where + ".initial.p",
                "probability out of range [0,1]");
        require(initial.n >= 0, where + ".initial.n", "must be >= 0");
        require(initial.radius >= 0.0, where + ".initial.radius", "must be >= 0");
    }
};

// ------------------------------------------------------------------ epidemic

struct StrainConfig {
    double chronic_rate = 0.008;  // per-contact transmission probability, chronic stage
    double early_factor = 15.0;   // early rate = min(1, early_factor * chronic_rate)
    int seed_count = 0;           // hosts infected at t = 0
    // Evolution runs start each seed at a random factor instead of early_factor.
    bool random_factor = false;
    double factor_min = 5.0;
    double factor_max = 25.0;
};

struct EvolutionConfig {
    enum class Increment { Uniform, Normal };
    bool enabled = false;
    double delta = 0.01; // uniform on [-delta, delta], or normal sd delta/2
    Increment increment = Increment::Uniform;
};

struct LateStageConfig {
    bool enabled = false;
    double factor = 7.0;             // late rate = min(1, factor * chronic_rate)
    double chronic_mean_days = 3650; // geometric mean dwell before Late
};

struct EpidemicConfig {
    bool enabled = false;
    Step seed_step = 0; // when the seed infections enter (0 = at init)
    double contact_prob_per_day = 0.3; // per-partnership contact probability c
    double early_mean_days = 75.0;
    enum class EarlyModel { Geometric, Weibull };
    EarlyModel early_model = EarlyModel::Geometric;
    double weibull_shape = 2.0;
    double gud_multiplier = 4.0;
    double gud_prevalence = 0.0;
    double treatment_transmission_multiplier = 0.05;
    double treatment_mortality_multiplier = 0.2;
    double tradeoff_gamma = 2.0;
    // Calibration point: alpha(calibration_beta) = calibration_alpha per day.
    // tradeoff_a, when >= 0, overrides the calibrated scale.
    double calibration_beta = 0.008;
    double calibration_alpha = 1.0 / 3650.0;
    double tradeoff_a = -1.0;
    EvolutionConfig evolution;
    LateStageConfig late_stage;
    std::vector<StrainConfig> strains;

    TradeoffParams tradeoff() const {
        TradeoffParams t;
        t.curvature = tradeoff_gamma;
        t.scale = tradeoff_a >= 0.0
                      ? tradeoff_a
                      : tradeoff_scale_from(calibration_beta, calibration_alpha, tradeoff_gamma);
        return t;
    }

    void validate() const {
        require(seed_step >= 0, "epidemic.seed_step", "must be >= 0");
        require(contact_prob_per_day >= 0.0 && contact_prob_per_day <= 1.0,
                "epidemic.contact_prob_per_day", "probability out of range [0,1]");
        require(early_mean_days > 0.0, "epidemic.early_mean_days", "must be > 0");
        require(weibull_shape > 0.0, "epidemic.weibull_shape", "must be > 0");
        require(gud_multiplier >= 0.0, "epidemic.gud_multiplier", "must be >= 0");
        require(gud_prevalence >= 0.0 && gud_prevalence <= 1.0, "epidemic.gud_prevalence",
                "probability out of range [0,1]");
        require(treatment_transmission_multiplier >= 0.0,
                "epidemic.treatment_transmission_multiplier", "must be >= 0");
        require(treatment_mortality_multiplier >= 0.0,
                "epidemic.treatment_mortality_multiplier", "must be >= 0");
        require(tradeoff_gamma > 1.0, "epidemic.tradeoff_gamma", "must be > 1");
        require(calibration_beta > 0.0, "epidemic.calibration_beta", "must be > 0");
        require(calibration_alpha >= 0.0 && calibration_alpha <= 1.0,
                "epidemic.calibration_alpha", "must be in [0,1]");
        require(evolution.delta >= 0.0, "epidemic.evolution.delta", "must be >= 0");
        require(late_stage.factor >= 0.0, "epidemic.late_stage.factor", "must be >= 0");
        require(late_stage.chronic_mean_days > 0.0, "epidemic.late_stage.chronic_mean_days",
                "must be > 0");
        for (size_t i = 0; i < strains.size(); ++i) {
            const auto& s = strains[i];
            const std::string where = "epidemic.strains[" + std::to_string(i) + "]";
            require(s.chronic_rate >= 0.0 && s.chronic_rate <= 1.0, where + ".chronic_rate",
                    "probability out of range [0,1]");
            require(s.early_factor >= 0.0, where + ".early_factor", "must be >= 0");
            require(s.seed_count >= 0, where + ".seed_count", "must be >= 0");
            require(s.factor_min >= 0.0 && s.factor_max >= s.factor_min,
                    where + ".factor_min/max", "need 0 <= min <= max");
        }
    }
};

// ------------------------------------------------------------- interventions

enum class InterventionKind { PairSaferSexTest, Cure, Treatment, Vaccine, SeekAndTreat };

struct InterventionConfig {
    InterventionKind kind = InterventionKind::Cure;
    Step start_step = 0;
    // PairSaferSexTest
    double adoption_fraction = 1.0;
    double assortativity = 0.0; // w >= 0; concordant pairs x(1+w), discordant x 1/(1+w)
    int duration_days = 84;
    double safer_sex_multiplier = 0.10; // p_s
    enum class Cooperation { Full, PrimaryOnly };
    Cooperation cooperation = Cooperation::Full;
    // Cure / Vaccine
    double resistance = 0.0;
    // Treatment (also SeekAndTreat action parameters)
    double transmission_multiplier = 0.05;
    double mortality_multiplier = 0.2;
    // SeekAndTreat
    enum class Action { Treatment, Cure };
    Action action = Action::Treatment;
    double positive_boost = 3.0;     // multiplies follow_p on links out of positives
    double negative_removal_q = 0.3; // removal probability for test-negative members
    // Sampling design that delivers the intervention (all kinds except the pair strategy).
    std::optional<DesignConfig> design;

    void validate(const std::string& where) const {
        require(start_step >= 0, where + ".start_step", "must be >= 0");
        require(adoption_fraction >= 0.0 && adoption_fraction <= 1.0,
                where + ".adoption_fraction", "probability out of range [0,1]");
        require(assortativity >= 0.0, where + ".assortativity", "must be >= 0");
        require(duration_days >= 0, where + ".duration_days", "must be >= 0");
        require(safer_sex_multiplier >= 0.0 && safer_sex_multiplier <= 1.0,
                where + ".safer_sex_multiplier", "probability out of range [0,1]");
        require(resistance >= 0.0 && resistance <= 1.0, where + ".resistance",
                "must be in [0,1]");
        require(transmission_multiplier >= 0.0, where + ".transmission_multiplier",
                "must be >= 0");
        require(mortality_multiplier >= 0.0, where + ".mortality_multiplier",
                "must be >= 0");
        require(positive_boost >= 0.0, where + ".positive_boost", "must be >= 0");
        require(negative_removal_q >= 0.0 && negative_removal_q <= 1.0,
                where + ".negative_removal_q", "probability out of range [0,1]");
        if (kind == InterventionKind::PairSaferSexTest) {
            require(!design.has_value(), where + ".design",
                    "pair strategy carries no sampling design");
        } else {
            require(design.has_value(), where + ".design",
                    "intervention needs a sampling design");
            design->validate(where + ".design");
        }
    }
};

// --------------------------------------------------------------- diagnostics

struct EcfConfig {
    std::string series = "prevalence";
    int grid_points = 64;
    double a_max = 0.0;   // 0 selects 8/sd over the auto window
    int auto_window = 200;
};

struct DiagnosticsConfig {
    EcfConfig ecf;
    int histogram_bins = 20;
    double histogram_min = 0.0; // bin range of the monitored series
    double histogram_max = 1.0;
    std::vector<Step> checkpoints; // empty = dyadic (64, 128, ...) plus the horizon
    int recency_days = 30;
    std::optional<std::pair<Step, Step>> equilibrium_window; // default: last half

    void validate(Step horizon) const {
        require(ecf.grid_points >= 2, "diagnostics.ecf.grid_points", "must be >= 2");
        require(ecf.a_max >= 0.0, "diagnostics.ecf.a_max", "must be >= 0");
        require(ecf.auto_window >= 2, "diagnostics.ecf.auto_window", "must be >= 2");
        require(histogram_bins >= 1, "diagnostics.histogram_bins", "must be >= 1");
        require(histogram_max > histogram_min, "diagnostics.histogram_max",
                "must exceed histogram_min");
        require(recency_days >= 0, "diagnostics.recency_days", "must be >= 0");
        if (equilibrium_window) {
            require(equilibrium_window->first >= 1 &&
                        equilibrium_window->first <= equilibrium_window->second &&
                        equilibrium_window->second <= horizon,
                    "diagnostics.equilibrium_window", "need 1 <= a <= b <= horizon");
        }
        for (Step c : checkpoints)
            require(c >= 1 && c <= horizon, "diagnostics.checkpoints",
                    "checkpoints must lie in [1, horizon]");
    }
};

// ----------------------------------------------------------------- top level

struct SimConfig {
    int k_groups = 10;
    std::int64_t n_target = 1000;
    Step horizon = 365;
    int time_step_days = 1; // fixed; the rate arithmetic assumes daily steps
    std::uint64_t rng_seed = 1;
    DemographyConfig demography;
    SpatialConfig spatial;
    NetworkConfig network;
    EpidemicConfig epidemic;
    std::vector<DesignConfig> designs;
    std::vector<InterventionConfig> interventions;
    DiagnosticsConfig diagnostics;

    // Fill derived defaults; call once after parsing, before validate().
    void resolve() {
        if (spatial.group_size.kind == GroupSizeConfig::Kind::Fixed &&
            spatial.group_size.lambda < 0.0 && n_target > 0 && k_groups > 0)
            spatial.group_size.lambda =
                static_cast<double>(n_target) / static_cast<double>(k_groups);
        if (demography.mortality_per_day == 0.0 && demography.mortality_per_year > 0.0)
            demography.mortality_per_day =
                convert_period_rate(demography.mortality_per_year, 365);
        if (epidemic.tradeoff_a < 0.0)
            epidemic.tradeoff_a = tradeoff_scale_from(
                epidemic.calibration_beta, epidemic.calibration_alpha,
                epidemic.tradeoff_gamma);
    }

    void validate() const {
        require(k_groups >= 1, "k_groups", "must be >= 1");
        require(n_target >= 1, "n_target", "must be >= 1");
        require(horizon >= 1, "horizon", "must be >= 1");
        require(time_step_days == 1, "time_step_days", "must be 1 (daily steps)");
        demography.validate();
        spatial.validate();
        network.validate();
        epidemic.validate();
        for (size_t i = 0; i < designs.size(); ++i)
            designs[i].validate("designs[" + std::to_string(i) + "]");
        for (size_t i = 0; i < interventions.size(); ++i)
            interventions[i].validate("interventions[" + std::to_string(i) + "]");
        diagnostics.validate(horizon);
        int pair_strategies = 0;
        for (const auto& iv : interventions)
            if (iv.kind == InterventionKind::PairSaferSexTest) ++pair_strategies;
        require(pair_strategies <= 1, "interventions",
                "at most one pair_safer_sex_test strategy per scenario");
    }
};

} // namespace driftnet
