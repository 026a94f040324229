#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "driftnet/config.hpp"
#include "driftnet/population.hpp"

namespace driftnet {

/** Running empirical characteristic function of a monitored series,
 * c(a) = (1/t) sum_t' exp(i a X_t'), on a fixed grid of argument values.
 *
 * With a_max = 0 the grid is sized from the data: the first auto_window
 * values are buffered, a_max is set to 8 over their standard deviation, and
 * the buffer is folded in.  c(0) = 1 exactly at every count.
 */
class EcfAccumulator {
public:
    EcfAccumulator() = default;
    explicit EcfAccumulator(const EcfConfig& cfg) : cfg_(cfg) {
        if (cfg_.a_max > 0.0) fix_grid(cfg_.a_max);
    }

    void update(double x) {
        if (!fixed_) {
            buffer_.push_back(x);
            if (static_cast<int>(buffer_.size()) >= cfg_.auto_window) fix_from_buffer();
            return;
        }
        fold(x);
    }

    // Force the grid if still buffering (end of a short run, or an early
    // checkpoint), then report.
    std::int64_t count() const { return count_ + static_cast<std::int64_t>(buffer_.size()); }
    bool ready() const { return fixed_; }
    void finalize() {
        if (!fixed_) fix_from_buffer();
    }

    const std::vector<double>& grid() const { return grid_; }

    std::vector<std::complex<double>> eval() const {
        std::vector<std::complex<double>> out(grid_.size());
        if (count_ <= 0) return out;
        const auto t = static_cast<double>(count_);
        for (std::size_t k = 0; k < grid_.size(); ++k)
            out[k] = {sum_cos_[k] / t, sum_sin_[k] / t};
        return out;
    }

    // Snapshot persistence accessors.
    const EcfConfig& config() const { return cfg_; }
    bool fixed_grid() const { return fixed_; }
    double a_max() const { return a_max_; }
    const std::vector<double>& sum_cos() const { return sum_cos_; }
    const std::vector<double>& sum_sin() const { return sum_sin_; }
    const std::vector<double>& pending() const { return buffer_; }
    void restore(double a_max, std::vector<double> sum_cos, std::vector<double> sum_sin,
                 std::int64_t n, std::vector<double> pending) {
        if (a_max > 0.0) {
            fix_grid(a_max);
            sum_cos_ = std::move(sum_cos);
            sum_sin_ = std::move(sum_sin);
            count_ = n;
        }
        buffer_ = std::move(pending);
    }

private:
    void fix_grid(double a_max) {
        a_max_ = a_max;
        fixed_ = true;
        grid_.resize(cfg_.grid_points);
        for (int k = 0; k < cfg_.grid_points; ++k)
            grid_[k] = a_max * static_cast<double>(k) /
                       static_cast<double>(cfg_.grid_points - 1);
        sum_cos_.assign(grid_.size(), 0.0);
        sum_sin_.assign(grid_.size(), 0.0);
    }

    void fix_from_buffer() {
        double mean = 0.0;
        for (double x : buffer_) mean += x;
        if (!buffer_.empty()) mean /= static_cast<double>(buffer_.size());
        double var = 0.0;
        for (double x : buffer_) var += (x - mean) * (x - mean);
        if (buffer_.size() > 1) var /= static_cast<double>(buffer_.size() - 1);
        const double sd = std::sqrt(var);
        fix_grid(sd > 0.0 ? 8.0 / sd : 1.0);
        for (double x : buffer_) fold(x);
        buffer_.clear();
    }

    void fold(double x) {
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            sum_cos_[k] += std::cos(grid_[k] * x);
            sum_sin_[k] += std::sin(grid_[k] * x);
        }
        ++count_;
    }

    EcfConfig cfg_;
    bool fixed_ = false;
    double a_max_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> sum_cos_;
    std::vector<double> sum_sin_;
    std::int64_t count_ = 0;
    std::vector<double> buffer_;
};

/** Prefix mean and cumulative histogram of a monitored series. */
class CumulativeTracker {
public:
    CumulativeTracker() = default;
    CumulativeTracker(int bins, double lo, double hi) : lo_(lo), hi_(hi), counts_(bins, 0) {}

    void update(double x) {
        sum_ += x;
        ++count_;
        if (!counts_.empty()) {
            const double span = hi_ - lo_;
            auto bin = static_cast<std::int64_t>((x - lo_) / span *
                                                 static_cast<double>(counts_.size()));
            bin = std::clamp<std::int64_t>(bin, 0, static_cast<std::int64_t>(counts_.size()) - 1);
            ++counts_[static_cast<std::size_t>(bin)];
        }
    }

    double mean() const { return count_ > 0 ? sum_ / static_cast<double>(count_) : 0.0; }
    std::int64_t count() const { return count_; }
    double sum() const { return sum_; }
    const std::vector<std::int64_t>& histogram() const { return counts_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    void restore(double sum, std::int64_t count, std::vector<std::int64_t> counts) {
        sum_ = sum;
        count_ = count;
        counts_ = std::move(counts);
    }

private:
    double lo_ = 0.0;
    double hi_ = 1.0;
    double sum_ = 0.0;
    std::int64_t count_ = 0;
    std::vector<std::int64_t> counts_;
};

// Cumulative mean curve and final histogram of a whole series (batch form).
inline std::vector<double> cumulative_means(const std::vector<double>& series) {
    std::vector<double> out;
    out.reserve(series.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        out.push_back(sum / static_cast<double>(i + 1));
    }
    return out;
}

// ------------------------------------------------------- degree comparisons

struct StrataMeans {
    // Strata over current infections: recent (age <= tau), longer, and nodes
    // never infected.  Empty strata stay unset rather than zero.
    std::optional<double> degree_recent, degree_longer, degree_never;
    std::optional<double> outdegree_recent, outdegree_longer, outdegree_never;
};

/// Mean degree and mean out-degree (links to uninfected partners) by
/// infection-recency stratum.
inline StrataMeans infection_degree_comparison(const Population& pop, Step t,
                                               int recency_days) {
    double deg[3] = {0, 0, 0}, outdeg[3] = {0, 0, 0};
    std::int64_t n[3] = {0, 0, 0};
    for (const auto& node : pop.nodes) {
        int stratum;
        if (node.infected())
            stratum = (t - node.infection->infected_at) <= recency_days ? 0 : 1;
        else if (node.first_infected_at < 0)
            stratum = 2;
        else
            continue; // cured: formerly infected, outside all three strata
        std::int64_t open = 0;
        for (NodeId nb : node.neighbors)
            if (!pop.at(nb).infected()) ++open;
        deg[stratum] += node.degree();
        outdeg[stratum] += static_cast<double>(open);
        ++n[stratum];
    }
    auto mean = [&](int s, const double* acc) -> std::optional<double> {
        if (n[s] == 0) return std::nullopt;
        return acc[s] / static_cast<double>(n[s]);
    };
    StrataMeans out;
    out.degree_recent = mean(0, deg);
    out.degree_longer = mean(1, deg);
    out.degree_never = mean(2, deg);
    out.outdegree_recent = mean(0, outdeg);
    out.outdegree_longer = mean(1, outdeg);
    out.outdegree_never = mean(2, outdeg);
    return out;
}

// ----------------------------------------------------------- window summary

struct WindowStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
};

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// Stats of series values at steps in [first, last]; steps are 1-based and the
// series holds one value per step starting at step 1.
inline WindowStats window_stats(const std::vector<double>& series, Step first, Step last) {
    require(first >= 1 && first <= last &&
                static_cast<std::size_t>(last) <= series.size(),
            "window", "need 1 <= first <= last <= series length");
    std::vector<double> vals(series.begin() + (first - 1), series.begin() + last);
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    if (vals.size() > 1) var /= static_cast<double>(vals.size() - 1);
    std::sort(vals.begin(), vals.end());
    WindowStats w;
    w.count = static_cast<std::int64_t>(vals.size());
    w.mean = mean;
    w.sd = std::sqrt(var);
    w.q05 = quantile_sorted(vals, 0.05);
    w.q25 = quantile_sorted(vals, 0.25);
    w.q50 = quantile_sorted(vals, 0.50);
    w.q75 = quantile_sorted(vals, 0.75);
    w.q95 = quantile_sorted(vals, 0.95);
    return w;
}

// ------------------------------------------------------------- run artifacts

/// One row of the emitted time series; NaN marks an absent value (empty CSV
/// cell), e.g. a stratum with no members.
struct Row {
    Step step = 0;
    std::int64_t population = 0;
    std::int64_t births = 0;
    std::int64_t deaths_background = 0;
    std::int64_t deaths_disease = 0;
    std::int64_t edges = 0;
    std::int64_t edges_formed = 0;
    std::int64_t edges_dissolved = 0;
    double mean_degree = 0.0;
    std::int64_t infected = 0;
    double prevalence = 0.0;
    std::int64_t incidence = 0;
    std::int64_t early_count = 0;
    std::int64_t chronic_count = 0;
    std::int64_t late_count = 0;
    std::int64_t treated_count = 0;
    std::int64_t immune_count = 0;
    double mean_early_factor = 0.0;
    double monitored_cum_mean = 0.0;
    double degree_recent = 0.0, degree_longer = 0.0, degree_never = 0.0;
    double outdegree_recent = 0.0, outdegree_longer = 0.0, outdegree_never = 0.0;
    std::int64_t tests_cum = 0;
    std::int64_t cures_cum = 0;
    std::int64_t treatments_cum = 0;
    std::int64_t vaccinations_cum = 0;
    std::int64_t adopters = 0;
    std::int64_t adopter_incidence_cum = 0;
    std::int64_t nonadopter_incidence_cum = 0;
    std::vector<std::int64_t> strain_counts; // per seeded strain family
    std::vector<std::int64_t> sample_sizes;  // per design, config order
    std::vector<std::int64_t> sample_added;
    std::vector<std::int64_t> sample_removed;
};

struct EcfSnapshot {
    Step t = 0;
    std::vector<double> grid;
    std::vector<std::complex<double>> values;
    double tail_dispersion = 0.0; // vs the previous snapshot
};

struct HistogramSnapshot {
    Step t = 0;
    std::vector<std::int64_t> counts;
};

/// Everything one run emits: per-step series, ECF and cumulative-histogram
/// snapshots at the checkpoints, and the event log.
struct RunOutput {
    SimConfig config;
    std::vector<std::string> design_names;
    std::vector<Row> rows;
    std::vector<EcfSnapshot> ecf;
    std::vector<HistogramSnapshot> histograms;
    std::vector<std::string> event_log;

    std::vector<double> series(const std::string& name) const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) {
            if (name == "prevalence") out.push_back(r.prevalence);
            else if (name == "population") out.push_back(static_cast<double>(r.population));
            else if (name == "infected") out.push_back(static_cast<double>(r.infected));
            else if (name == "edges") out.push_back(static_cast<double>(r.edges));
            else if (name == "mean_degree") out.push_back(r.mean_degree);
            else if (name == "incidence") out.push_back(static_cast<double>(r.incidence));
            else throw ConfigError("series", "unknown series name '" + name + "'");
        }
        return out;
    }
};

struct ScenarioComparison {
    std::string series;
    Step window_first = 0, window_last = 0;
    WindowStats baseline;
    WindowStats treatment;
    std::vector<double> paired_diffs; // treatment - baseline, per replicate
    double mean_diff = 0.0;
    std::int64_t pairs_lower = 0; // replicates where treatment < baseline
};

/// Equilibrium-window comparison of paired runs (replicate i against
/// replicate i, identical seeds making the pairing meaningful).
inline ScenarioComparison compare_runs(const std::vector<std::vector<double>>& baseline,
                                       const std::vector<std::vector<double>>& treatment,
                                       Step first, Step last, const std::string& series) {
    require(!baseline.empty() && baseline.size() == treatment.size(), "compare.runs",
            "need equal, nonzero replicate counts");
    for (const auto& s : baseline)
        require(s.size() == baseline[0].size(), "compare.baseline", "horizons differ");
    for (const auto& s : treatment)
        require(s.size() == baseline[0].size(), "compare.treatment", "horizons differ");

    ScenarioComparison out;
    out.series = series;
    out.window_first = first;
    out.window_last = last;

    std::vector<double> base_all, treat_all;
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        const double mb = window_stats(baseline[i], first, last).mean;
        const double mt = window_stats(treatment[i], first, last).mean;
        out.paired_diffs.push_back(mt - mb);
        out.mean_diff += mt - mb;
        if (mt < mb) ++out.pairs_lower;
        base_all.insert(base_all.end(), baseline[i].begin() + (first - 1),
                        baseline[i].begin() + last);
        treat_all.insert(treat_all.end(), treatment[i].begin() + (first - 1),
                         treatment[i].begin() + last);
    }
    out.mean_diff /= static_cast<double>(baseline.size());
    out.baseline = window_stats(base_all, 1, static_cast<Step>(base_all.size()));
    out.treatment = window_stats(treat_all, 1, static_cast<Step>(treat_all.size()));
    return out;
}

// Dispersion of the ECF tail between two snapshots: variance of the complex
// change over the top quartile of the grid.  Reported, not thresholded.
inline double ecf_tail_dispersion(const std::vector<std::complex<double>>& prev,
                                  const std::vector<std::complex<double>>& cur) {
    if (prev.size() != cur.size() || cur.empty()) return 0.0;
    const std::size_t start = cur.size() - cur.size() / 4;
    double mean_re = 0.0, mean_im = 0.0;
    const auto m = static_cast<double>(cur.size() - start);
    if (m <= 0.0) return 0.0;
    for (std::size_t k = start; k < cur.size(); ++k) {
        mean_re += cur[k].real() - prev[k].real();
        mean_im += cur[k].imag() - prev[k].imag();
    }
    mean_re /= m;
    mean_im /= m;
    double var = 0.0;
    for (std::size_t k = start; k < cur.size(); ++k) {
        const double dre = cur[k].real() - prev[k].real() - mean_re;
        const double dim = cur[k].imag() - prev[k].imag() - mean_im;
        var += dre * dre + dim * dim;
    }
    return var / m;
}

} // namespace driftnet
