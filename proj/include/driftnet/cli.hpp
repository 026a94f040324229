#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftnet/config_json.hpp"
#include "driftnet/engine.hpp"
#include "driftnet/outputs.hpp"
#include "driftnet/snapshot.hpp"

namespace driftnet {

// exit codes: 0 success, 1 validation/usage, 2 I/O
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

namespace clidetail {

inline SimConfig load_config(const std::string& path, const std::string& scenario) {
    return parse_config(outio::read_file(path), scenario);
}

inline std::pair<Step, Step> parse_window(const std::string& spec) {
    const auto colon = spec.find(':');
    require(colon != std::string::npos, "window", "expected A:B");
    Step a = 0, b = 0;
    try {
        a = std::stoll(spec.substr(0, colon));
        b = std::stoll(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError("window", "expected integer steps A:B");
    }
    require(a >= 1 && a <= b, "window", "need 1 <= A <= B");
    return {a, b};
}

} // namespace clidetail

/** Command-line surface.
 *
 *   simulate   --config F [--scenario S] [--seed N] [--steps N] --out DIR
 *              [--snapshot-out F] [--resume SNAPSHOT]
 *   replicates --config F [--scenario S] --reps R [--seed-base S] [--jobs J] --out DIR
 *   compare    --baseline DIR --treatment DIR --window A:B [--series NAME] [--out F]
 *   validate   --config F [--scenario S]
 */
inline int cli_run(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
    CLI::App app{"driftnet: temporal spatial network simulation of sampling designs "
                 "and interventions"};
    app.require_subcommand(1);

    // simulate
    std::string sim_config, sim_scenario, sim_out, sim_snapshot_out, sim_resume;
    std::optional<std::uint64_t> sim_seed;
    std::optional<Step> sim_steps;
    auto* sim = app.add_subcommand("simulate", "run one simulation");
    sim->add_option("--config", sim_config, "config file (JSON)");
    sim->add_option("--scenario", sim_scenario, "named scenario block to run");
    sim->add_option("--seed", sim_seed, "override rng_seed");
    sim->add_option("--steps", sim_steps, "override horizon (total steps)");
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->add_option("--snapshot-out", sim_snapshot_out, "write final state snapshot");
    sim->add_option("--resume", sim_resume, "resume from a snapshot file");

    // replicates
    std::string rep_config, rep_scenario, rep_out;
    int rep_reps = 1;
    std::uint64_t rep_seed_base = 1;
    int rep_jobs = 0;
    auto* rep = app.add_subcommand("replicates", "run independent replicates");
    rep->add_option("--config", rep_config, "config file (JSON)")->required();
    rep->add_option("--scenario", rep_scenario, "named scenario block to run");
    rep->add_option("--reps", rep_reps, "replicate count")->required();
    rep->add_option("--seed-base", rep_seed_base, "seed of replicate 0 (default 1)");
    rep->add_option("--jobs", rep_jobs, "worker threads (default: hardware)");
    rep->add_option("--out", rep_out, "output directory")->required();

    // compare
    std::string cmp_base, cmp_treat, cmp_window, cmp_series = "prevalence", cmp_out;
    auto* cmp = app.add_subcommand("compare", "compare equilibrium windows");
    cmp->add_option("--baseline", cmp_base, "baseline run or replicates dir")->required();
    cmp->add_option("--treatment", cmp_treat, "treatment run or replicates dir")->required();
    cmp->add_option("--window", cmp_window, "equilibrium window A:B (steps)")->required();
    cmp->add_option("--series", cmp_series, "series column (default prevalence)");
    cmp->add_option("--out", cmp_out, "write the comparison JSON here too");

    // validate
    std::string val_config, val_scenario;
    auto* val = app.add_subcommand("validate", "validate a config file");
    val->add_option("--config", val_config, "config file (JSON)")->required();
    val->add_option("--scenario", val_scenario, "validate one scenario only");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << app.help();
        return kExitValidation;
    }

    try {
        if (sim->parsed()) {
            SimState state;
            if (!sim_resume.empty()) {
                require(!sim_seed.has_value(), "simulate.seed",
                        "--seed cannot be combined with --resume");
                state = load_snapshot(outio::read_file(sim_resume));
                if (sim_steps) state.cfg.horizon = *sim_steps;
                require(state.t < state.cfg.horizon, "simulate.steps",
                        "snapshot is already at or past the horizon");
            } else {
                require(!sim_config.empty(), "simulate.config", "--config is required");
                SimConfig cfg = clidetail::load_config(sim_config, sim_scenario);
                if (sim_seed) cfg.rng_seed = *sim_seed;
                if (sim_steps) cfg.horizon = *sim_steps;
                state = init_simulation(cfg);
            }
            const RunOutput run = run_to_horizon(state);
            write_outputs(run, sim_out);
            if (!sim_snapshot_out.empty())
                outio::write_file(sim_snapshot_out, save_snapshot(state));
            out << "wrote " << sim_out << " (" << run.rows.size() << " steps)\n";
            return kExitOk;
        }
        if (rep->parsed()) {
            SimConfig cfg = clidetail::load_config(rep_config, rep_scenario);
            const int jobs = rep_jobs > 0
                                 ? rep_jobs
                                 : static_cast<int>(
                                       std::max(1u, std::thread::hardware_concurrency()));
            const auto runs = run_replicates(cfg, rep_reps, rep_seed_base, jobs);
            for (std::size_t i = 0; i < runs.size(); ++i) {
                char name[16];
                std::snprintf(name, sizeof name, "rep_%03zu", i);
                write_outputs(runs[i], std::filesystem::path(rep_out) / name);
            }
            ojson manifest = {{"schema_version", kSchemaVersion},
                              {"replicates", rep_reps},
                              {"seed_base", rep_seed_base}};
            outio::write_file(std::filesystem::path(rep_out) / "manifest.json",
                              manifest.dump(2) + "\n");
            out << "wrote " << rep_out << " (" << rep_reps << " replicates)\n";
            return kExitOk;
        }
        if (cmp->parsed()) {
            const auto [first, last] = clidetail::parse_window(cmp_window);
            const auto base = load_series(cmp_base, cmp_series);
            const auto treat = load_series(cmp_treat, cmp_series);
            require(base.size() == treat.size(), "compare",
                    "baseline and treatment hold different replicate counts");
            for (const auto& s : base)
                require(static_cast<std::size_t>(last) <= s.size(), "compare.window",
                        "window exceeds the baseline horizon");
            for (const auto& s : treat)
                require(s.size() == base[0].size(), "compare",
                        "baseline and treatment horizons differ");
            const ScenarioComparison c = compare_runs(base, treat, first, last, cmp_series);
            const std::string text = comparison_json(c, cmp_base, cmp_treat).dump(2) + "\n";
            out << text;
            if (!cmp_out.empty()) outio::write_file(cmp_out, text);
            return kExitOk;
        }
        if (val->parsed()) {
            const std::string text = outio::read_file(val_config);
            if (!val_scenario.empty()) {
                parse_config(text, val_scenario);
            } else {
                parse_config(text);
                for (const auto& name : config_scenarios(text)) parse_config(text, name);
            }
            out << "ok\n";
            return kExitOk;
        }
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}

} // namespace driftnet
