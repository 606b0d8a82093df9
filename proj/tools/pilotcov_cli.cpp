// SPDX-License-Identifier: Apache-2.0
//
// pilotcov: run a Monte-Carlo sweep and write plot-ready CSV.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 domain error,
// 1 anything else. Failures print one line to stderr:
//   error kind=<config|io|domain|internal> field=<name> message="<text>"
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pilotcov/covariance_io.hpp"
#include "pilotcov/experiment.hpp"

namespace {

int fail(const char* kind, const std::string& field, const std::string& message, int code) {
    std::cerr << "error kind=" << kind << " field=" << (field.empty() ? "-" : field) << " message=\"" << message
              << "\"\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace pilotcov;

    CLI::App app{"Covariance-aided channel estimation sweeps under pilot contamination"};
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> sweep;
    std::optional<std::string> estimators;
    std::optional<int> trials;
    std::optional<int> cells;
    std::optional<int> threads;
    std::string dump_covariances;
    bool quiet = false;

    app.add_option("--config", config_path, "Experiment config file (key = value)");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--out", out, "Output CSV path");
    app.add_option("--sweep", sweep, "Sweep variable")->check(CLI::IsMember({"m", "sigma"}));
    app.add_option("--estimators", estimators, "Comma-separated subset of LS,CB,CPA,no-int");
    app.add_option("--trials", trials, "Trials per sweep point");
    app.add_option("--cells", cells, "Number of cells (2 or 7)");
    app.add_option("--threads", threads, "Worker threads");
    app.add_option("--dump-covariances", dump_covariances,
                   "Also write the first trial's covariance set (first sweep point) to this file");
    app.add_flag("-q,--quiet", quiet, "Do not echo the CSV to stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("config", "argv", e.what(), 2);
    }

    try {
        ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (seed) config.seed = *seed;
        if (out) config.out = *out;
        if (sweep) config.sweep = *sweep == "m" ? SweepVariable::Antennas : SweepVariable::Sigma;
        if (estimators) config.estimators = parse_estimator_list(*estimators);
        if (trials) config.trials = *trials;
        if (cells) config.cells = *cells;
        if (threads) config.threads = *threads;
        config.validate();

        const auto rows = run_sweep(config);
        emit_csv(rows, config.out);
        if (!quiet) std::cout << format_csv(rows);

        if (!dump_covariances.empty()) {
            const NetworkScenario s = trial_scenario(config, 0, 0);
            const AngularSpread spread = config.sweep == SweepVariable::Sigma
                                             ? AngularSpread::gaussian(deg2rad(config.sigmas_deg.front()))
                                             : AngularSpread{config.aoa, deg2rad(config.spread_deg)};
            std::vector<CovarianceRecord> records;
            for (std::size_t i = 0; i < s.links.size(); ++i)
                records.push_back({{s.covariances[i], s.links[i].delta_sq}, spread.around(s.links[i].mean_aoa)});
            write_covariance_set(dump_covariances, records);
        }
    } catch (const ConfigError& e) {
        return fail("config", e.field(), e.what(), 2);
    } catch (const IoError& e) {
        return fail("io", e.path(), e.what(), 3);
    } catch (const DomainError& e) {
        return fail("domain", "", e.what(), 4);
    } catch (const std::exception& e) {
        return fail("internal", "", e.what(), 1);
    }
    return 0;
}
