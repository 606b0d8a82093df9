// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration and its flat key-value file format.
//
//   # comment
//   [scenario]              # optional table headers, only for grouping
//   cells = 2
//   aoa = "gaussian"
//   antennas = [10, 30, 100]
//
// Keys are global (table names do not namespace them). Strings may be quoted
// or bare; lists use brackets. Unknown keys are rejected.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pilotcov/scenario.hpp"

namespace pilotcov {

enum class Estimator { LS, CB, CPA, NoInt };

/// Canonical output order.
inline constexpr Estimator kAllEstimators[] = {Estimator::LS, Estimator::CB, Estimator::CPA, Estimator::NoInt};

const char* estimator_label(Estimator e);
Estimator parse_estimator(const std::string& label);

enum class SweepVariable { Antennas, Sigma };

struct ExperimentConfig {
    // Scenario defaults follow the basic simulation parameters of the model.
    int cells = 2;
    int users_per_cell = 10;
    double cell_radius_m = 1000.0;
    double user_distance_m = 800.0;
    double pathloss_exponent = 3.0;
    double edge_snr_db = 20.0;
    int pilot_len = 10;
    double spacing_ratio = 0.5;
    int num_paths = 50;
    std::optional<double> user_angle_deg;

    AngularSpread::Kind aoa = AngularSpread::Kind::Gaussian;
    double spread_deg = 10.0;  // uniform half width or Gaussian stddev
    int num_antennas = 10;     // used by the sigma sweep

    SweepVariable sweep = SweepVariable::Antennas;
    std::vector<int> antennas{10, 20, 50, 100};
    std::vector<double> sigmas_deg{5.0, 10.0, 20.0, 40.0};

    std::vector<Estimator> estimators{Estimator::LS, Estimator::CB, Estimator::CPA, Estimator::NoInt};
    int trials = 100;
    std::uint64_t seed = 1;
    std::string out = "results.csv";
    int threads = 1;
    int quadrature_nodes = 512;

    bool uses(Estimator e) const;
    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

/// Raw key -> value text, values unquoted, lists kept with brackets.
std::map<std::string, std::string> parse_key_values(const std::string& text);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::vector<Estimator> parse_estimator_list(const std::string& list);

}  // namespace pilotcov
