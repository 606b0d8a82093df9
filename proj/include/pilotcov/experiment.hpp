// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo sweeps: normalized estimation error, downlink MRC per-cell
// rate and CSV output.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pilotcov/config.hpp"

namespace pilotcov {

inline constexpr double kErrorFloorDb = -200.0;

/// Ratio-of-sums accumulator for the normalized error: numerators and
/// denominators are summed over cells and trials before taking the log.
class ErrorAccumulator {
public:
    void add(const CVectorXd& estimate, const CVectorXd& truth);
    void add_sums(double error_energy, double channel_energy);
    double error_energy() const { return num_; }
    double channel_energy() const { return den_; }
    /// 10 log10(num / den), floored at kErrorFloorDb. Throws on a zero denominator.
    double db() const;

private:
    double num_ = 0.0;
    double den_ = 0.0;
};

/// err over per-cell (estimate, true desired channel) pairs, in dB.
double normalized_error(std::span<const std::pair<CVectorXd, CVectorXd>> pairs);

struct RateReport {
    std::vector<double> sinr;  // per cell
    double rate = 0.0;         // (1/L) sum log2(1 + SINR_j), bit/s/Hz
    int undefined_beams = 0;   // cells whose estimate was zero
};

/// Downlink MRC with unit-norm beams w_j = h_jj_hat / ||h_jj_hat||.
/// cross[l][j] is the channel between the scheduled user of cell j and base
/// station l (reciprocal to the uplink); a cell with a zero estimate transmits
/// nothing and gets SINR 0.
RateReport mrc_rate(std::span<const CVectorXd> estimates, const std::vector<std::vector<CVectorXd>>& cross,
                    double noise_var);

struct EstimatorOutcome {
    Estimator estimator;
    std::vector<CVectorXd> estimates;  // per cell, desired channel
    std::vector<CVectorXd> truths;
    RateReport rate;
};

struct TrialResult {
    int point = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::vector<int> random_users;  // schedule for LS and CB
    std::vector<int> greedy_users;  // schedule for CPA and no-int; empty if unused
    std::vector<EstimatorOutcome> outcomes;
};

/// Value of the swept variable (M, or sigma in degrees) at `point`.
double sweep_value(const ExperimentConfig& config, int point);
int sweep_size(const ExperimentConfig& config);

/// One Monte-Carlo trial. A pure function of (config, point, trial).
TrialResult run_trial(const ExperimentConfig& config, int point, int trial);

struct AggregateRow {
    double sweep_value = 0.0;
    Estimator estimator = Estimator::LS;
    double err_db = 0.0;
    double rate_bps_hz = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
};

/// Rows ordered by sweep point, then by estimator in canonical order.
std::vector<AggregateRow> run_sweep(const ExperimentConfig& config);

std::string format_csv(std::span<const AggregateRow> rows);
void emit_csv(std::span<const AggregateRow> rows, const std::string& path);

/// Scenario used by `trial` at `point` (covariances attached).
NetworkScenario trial_scenario(const ExperimentConfig& config, int point, int trial);

}  // namespace pilotcov
