#pragma once

#include <cmath>

#include "driftnet/common.hpp"

namespace driftnet {

// Discrete Weibull hazard with the scale solved from a target mean rate:
// E(x) = 1/p gives lambda = p * Gamma(1 + 1/shape), and
// h(x) = (lambda * shape) * (lambda * x)^(shape - 1), capped at 1.
// shape = 1 reduces to the constant per-step hazard p.
inline double weibull_hazard(double days_since, double mean_rate, double shape) {
    require(mean_rate > 0.0 && mean_rate <= 1.0, "weibull_hazard.mean_rate", "must be in (0,1]");
    require(shape > 0.0, "weibull_hazard.shape", "must be > 0");
    require(days_since >= 0.0, "weibull_hazard.days_since", "must be >= 0");
    const double lambda = mean_rate * std::tgamma(1.0 + 1.0 / shape);
    const double h = lambda * shape * std::pow(lambda * days_since, shape - 1.0);
    return h < 1.0 ? h : 1.0;
}

// Per-step probability equivalent to probability p_period over k steps:
// p = 1 - (1 - p_period)^(1/k).  Inverse of p_period = 1 - (1-p)^k.
inline double convert_period_rate(double p_period, std::int64_t steps_in_period) {
    require(p_period >= 0.0 && p_period <= 1.0, "convert_period_rate.p", "must be in [0,1]");
    require(steps_in_period >= 1, "convert_period_rate.k", "must be >= 1");
    return 1.0 - std::pow(1.0 - p_period, 1.0 / static_cast<double>(steps_in_period));
}

// Virulence-transmission tradeoff alpha = a * beta^gamma: the excess daily
// mortality hazard a strain imposes while transmitting at rate beta.
struct TradeoffParams {
    double scale = 0.0;     // a; default is calibrated in config resolution
    double curvature = 2.0; // gamma > 1

    double virulence(double beta) const {
        return beta <= 0.0 ? 0.0 : scale * std::pow(beta, curvature);
    }
};

// Solve a from a known point on the curve, alpha(beta_ref) = alpha_ref.
inline double tradeoff_scale_from(double beta_ref, double alpha_ref, double curvature) {
    require(beta_ref > 0.0, "tradeoff.beta_ref", "must be > 0");
    require(alpha_ref >= 0.0, "tradeoff.alpha_ref", "must be >= 0");
    return alpha_ref / std::pow(beta_ref, curvature);
}

} // namespace driftnet
