#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftnet/config_json.hpp"
#include "driftnet/diagnostics.hpp"
#include "driftnet/engine.hpp"

namespace driftnet {

namespace outio {

// Shortest round-trip decimal form; NaN becomes an empty CSV cell.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string fmt(std::int64_t v) { return std::to_string(v); }

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError(path.string(), "cannot open for writing");
    os << content;
    if (!os) throw IoError(path.string(), "write failed");
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(path.string(), "cannot open for reading");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace outio

/// Fixed column order of series.csv; per-design and per-strain columns are
/// appended in config order.
inline std::vector<std::string> csv_header(const RunOutput& out) {
    std::vector<std::string> h = {
        "step", "population", "births", "deaths_background", "deaths_disease",
        "edges", "edges_formed", "edges_dissolved", "mean_degree",
        "infected", "prevalence", "incidence",
        "early_count", "chronic_count", "late_count", "treated_count", "immune_count",
        "mean_early_factor", "monitored_cum_mean",
        "degree_recent", "degree_longer", "degree_never",
        "outdegree_recent", "outdegree_longer", "outdegree_never",
        "tests_cum", "cures_cum", "treatments_cum", "vaccinations_cum",
        "adopters", "adopter_incidence_cum", "nonadopter_incidence_cum"};
    for (std::size_t i = 0; i < out.config.epidemic.strains.size(); ++i)
        h.push_back("strain_" + std::to_string(i) + "_count");
    for (const auto& name : out.design_names) h.push_back("sample_" + name + "_size");
    for (const auto& name : out.design_names) h.push_back("sample_" + name + "_added");
    for (const auto& name : out.design_names) h.push_back("sample_" + name + "_removed");
    return h;
}

inline std::string series_csv(const RunOutput& out) {
    using outio::fmt;
    std::string s;
    {
        const auto header = csv_header(out);
        for (std::size_t i = 0; i < header.size(); ++i)
            s += (i ? "," : "") + header[i];
        s += "\n";
    }
    for (const Row& r : out.rows) {
        std::vector<std::string> cells = {
            fmt(r.step), fmt(r.population), fmt(r.births), fmt(r.deaths_background),
            fmt(r.deaths_disease), fmt(r.edges), fmt(r.edges_formed),
            fmt(r.edges_dissolved), fmt(r.mean_degree), fmt(r.infected),
            fmt(r.prevalence), fmt(r.incidence), fmt(r.early_count),
            fmt(r.chronic_count), fmt(r.late_count), fmt(r.treated_count),
            fmt(r.immune_count), fmt(r.mean_early_factor), fmt(r.monitored_cum_mean),
            fmt(r.degree_recent), fmt(r.degree_longer), fmt(r.degree_never),
            fmt(r.outdegree_recent), fmt(r.outdegree_longer), fmt(r.outdegree_never),
            fmt(r.tests_cum), fmt(r.cures_cum), fmt(r.treatments_cum),
            fmt(r.vaccinations_cum), fmt(r.adopters), fmt(r.adopter_incidence_cum),
            fmt(r.nonadopter_incidence_cum)};
        for (std::int64_t c : r.strain_counts) cells.push_back(fmt(c));
        for (std::int64_t c : r.sample_sizes) cells.push_back(fmt(c));
        for (std::int64_t c : r.sample_added) cells.push_back(fmt(c));
        for (std::int64_t c : r.sample_removed) cells.push_back(fmt(c));
        for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
        s += "\n";
    }
    return s;
}

inline std::pair<Step, Step> default_window(const SimConfig& cfg) {
    if (cfg.diagnostics.equilibrium_window) return *cfg.diagnostics.equilibrium_window;
    const Step first = std::max<Step>(1, cfg.horizon / 2 + 1);
    return {first, cfg.horizon};
}

inline ojson window_stats_json(const WindowStats& w) {
    return ojson{{"count", w.count}, {"mean", w.mean},  {"sd", w.sd},
                 {"q05", w.q05},     {"q25", w.q25},    {"q50", w.q50},
                 {"q75", w.q75},     {"q95", w.q95}};
}

/// Equilibrium-window statistics of the main series plus the cumulative
/// histograms; the window is clipped to the steps this output actually holds.
inline ojson summary_json(const RunOutput& out) {
    const auto [wfirst, wlast] = default_window(out.config);
    const Step rows_from = out.rows.empty() ? 0 : out.rows.front().step;
    const Step rows_to = out.rows.empty() ? 0 : out.rows.back().step;
    const Step first = std::max(wfirst, rows_from);
    const Step last = std::min(wlast, rows_to);

    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["rng_seed"] = out.config.rng_seed;
    j["horizon"] = out.config.horizon;
    j["rows_from"] = rows_from;
    j["rows_to"] = rows_to;
    j["window"] = {first, last};
    ojson stats = ojson::object();
    if (!out.rows.empty() && first <= last) {
        for (const std::string name :
             {"prevalence", "population", "infected", "edges", "mean_degree", "incidence"}) {
            const auto series = out.series(name);
            // series index 1 corresponds to step rows_from
            const Step a = first - rows_from + 1;
            const Step b = last - rows_from + 1;
            stats[name] = window_stats_json(window_stats(series, a, b));
        }
    }
    j["series"] = stats;
    if (!out.rows.empty()) {
        const Row& r = out.rows.back();
        j["final"] = {{"step", r.step},
                      {"population", r.population},
                      {"edges", r.edges},
                      {"infected", r.infected},
                      {"prevalence", r.prevalence},
                      {"immune", r.immune_count},
                      {"mean_early_factor",
                       std::isnan(r.mean_early_factor) ? ojson() : ojson(r.mean_early_factor)}};
    }
    j["histogram_range"] = {out.config.diagnostics.histogram_min,
                            out.config.diagnostics.histogram_max};
    ojson hists = ojson::array();
    for (const auto& h : out.histograms)
        hists.push_back({{"t", h.t}, {"counts", h.counts}});
    j["cumulative_histograms"] = hists;
    return j;
}

inline ojson ecf_json(const RunOutput& out) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["series"] = out.config.diagnostics.ecf.series;
    ojson snaps = ojson::array();
    for (const auto& snap : out.ecf) {
        std::vector<double> re, im;
        re.reserve(snap.values.size());
        im.reserve(snap.values.size());
        for (const auto& c : snap.values) {
            re.push_back(c.real());
            im.push_back(c.imag());
        }
        snaps.push_back({{"t", snap.t},
                         {"grid", snap.grid},
                         {"re", re},
                         {"im", im},
                         {"tail_dispersion", snap.tail_dispersion}});
    }
    j["snapshots"] = snaps;
    return j;
}

/** Writes series.csv, summary.json, ecf.json, events.log, and the effective
 * config into dir.  Identical (config, seed) runs produce byte-identical
 * trees.
 */
inline void write_outputs(const RunOutput& out, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());
    outio::write_file(dir / "series.csv", series_csv(out));
    outio::write_file(dir / "summary.json", summary_json(out).dump(2) + "\n");
    outio::write_file(dir / "ecf.json", ecf_json(out).dump(2) + "\n");
    outio::write_file(dir / "effective_config.json", emit_config(out.config));
    std::string log;
    for (const auto& line : out.event_log) log += line + "\n";
    outio::write_file(dir / "events.log", log);
}

// ------------------------------------------------------------------- reading

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ConfigError("csv", "missing column '" + name + "'");
    }

    std::vector<double> numeric(const std::string& name) const {
        const std::size_t c = column(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) {
            const std::string& cell = c < r.size() ? r[c] : "";
            out.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : std::stod(cell));
        }
        return out;
    }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
    const std::string text = outio::read_file(path);
    CsvTable t;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::vector<std::string> cells;
        std::size_t cell_start = pos;
        for (std::size_t i = pos; i <= end; ++i) {
            if (i == end || text[i] == ',') {
                cells.emplace_back(text.substr(cell_start, i - cell_start));
                cell_start = i + 1;
            }
        }
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else if (!(cells.size() == 1 && cells[0].empty())) {
            t.rows.push_back(std::move(cells));
        }
        pos = end + 1;
    }
    if (t.header.empty()) throw ConfigError("csv", path.string() + ": empty file");
    return t;
}

/// A run directory holds series.csv directly; a replicates directory holds
/// rep_000/, rep_001/, ... subdirectories.
inline std::vector<std::filesystem::path>
run_dirs(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (fs::exists(root / "series.csv")) return {root};
    std::vector<fs::path> dirs;
    if (fs::is_directory(root))
        for (const auto& e : fs::directory_iterator(root))
            if (e.is_directory() && e.path().filename().string().rfind("rep_", 0) == 0 &&
                fs::exists(e.path() / "series.csv"))
                dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty())
        throw IoError(root.string(), "no series.csv or rep_*/series.csv found");
    return dirs;
}

inline std::vector<std::vector<double>>
load_series(const std::filesystem::path& root, const std::string& series) {
    std::vector<std::vector<double>> out;
    for (const auto& dir : run_dirs(root))
        out.push_back(read_csv(dir / "series.csv").numeric(series));
    return out;
}

inline ojson comparison_json(const ScenarioComparison& cmp, const std::string& baseline,
                             const std::string& treatment) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["series"] = cmp.series;
    j["window"] = {cmp.window_first, cmp.window_last};
    j["baseline"] = {{"dir", baseline},
                     {"runs", static_cast<std::int64_t>(cmp.paired_diffs.size())},
                     {"stats", window_stats_json(cmp.baseline)}};
    j["treatment"] = {{"dir", treatment},
                      {"runs", static_cast<std::int64_t>(cmp.paired_diffs.size())},
                      {"stats", window_stats_json(cmp.treatment)}};
    j["paired"] = {{"diffs", cmp.paired_diffs},
                   {"mean_diff", cmp.mean_diff},
                   {"pairs_lower", cmp.pairs_lower},
                   {"n", static_cast<std::int64_t>(cmp.paired_diffs.size())}};
    return j;
}

} // namespace driftnet
