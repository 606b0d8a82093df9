// SPDX-License-Identifier: Apache-2.0
#include "pilotcov/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <random>
#include <thread>

#include "pilotcov/estimators.hpp"
#include "pilotcov/pilot_coordinator.hpp"

namespace pilotcov {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream keyed by (master seed, keys...).
std::mt19937_64 substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = splitmix64(seed);
    for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    return std::mt19937_64(h);
}

// stream tags
enum : std::uint64_t { kScenarioStream = 1, kScheduleStream = 2, kChannelStream = 3, kNoiseStream = 4 };

int antennas_at(const ExperimentConfig& c, int point) {
    return c.sweep == SweepVariable::Antennas ? c.antennas.at(point) : c.num_antennas;
}

AngularSpread spread_at(const ExperimentConfig& c, int point) {
    if (c.sweep == SweepVariable::Sigma) return AngularSpread::gaussian(deg2rad(c.sigmas_deg.at(point)));
    return {c.aoa, deg2rad(c.spread_deg)};
}

ScenarioParams scenario_params(const ExperimentConfig& c, int m) {
    ScenarioParams p;
    p.num_cells = c.cells;
    p.users_per_cell = c.users_per_cell;
    p.cell_radius = c.cell_radius_m;
    p.user_distance = c.user_distance_m;
    p.pathloss_exponent = c.pathloss_exponent;
    p.edge_snr_db = c.edge_snr_db;
    p.pilot_len = c.pilot_len;
    p.geometry = ArrayGeometry<double>(m, c.spacing_ratio);
    if (c.user_angle_deg) p.fixed_user_angle = deg2rad(*c.user_angle_deg);
    return p;
}

// Channel realizations for one schedule: g[bs][cell] links the scheduled user
// of `cell` to base station `bs`. Each link has its own stream so a user's
// channel does not depend on which schedule picked it.
std::vector<std::vector<CVectorXd>> draw_schedule_channels(const ExperimentConfig& c, const NetworkScenario& s,
                                                           const AngularSpread& spread, int trial,
                                                           const std::vector<int>& users) {
    std::vector<std::vector<CVectorXd>> g(s.num_cells, std::vector<CVectorXd>(s.num_cells));
    for (int bs = 0; bs < s.num_cells; ++bs) {
        for (int cell = 0; cell < s.num_cells; ++cell) {
            auto rng = substream(c.seed, {kChannelStream, std::uint64_t(trial), s.link_index(cell, users[cell], bs)});
            g[bs][cell] = draw_link_channel(s, spread, c.num_paths, cell, users[cell], bs, rng);
        }
    }
    return g;
}

struct ScheduleSignals {
    std::vector<CVectorXd> received;  // stacked y at each base station
    std::vector<CVectorXd> clean;     // desired channel + noise only
    std::vector<CMatrixXd> blocks;    // Y at each base station
};

ScheduleSignals received_signals(const NetworkScenario& s, const std::vector<std::vector<CVectorXd>>& g,
                                 const PilotSequence<double>& pilot, const std::vector<CMatrixXd>& noise) {
    ScheduleSignals out;
    const CVectorXd& sym = pilot.symbols();
    for (int bs = 0; bs < s.num_cells; ++bs) {
        CVectorXd total = CVectorXd::Zero(s.geometry.num_antennas);
        for (int cell = 0; cell < s.num_cells; ++cell) total += g[bs][cell];
        CMatrixXd y = total * sym.transpose() + noise[bs];
        CMatrixXd y_clean = g[bs][bs] * sym.transpose() + noise[bs];
        out.received.push_back(vectorize(y));
        out.clean.push_back(vectorize(y_clean));
        out.blocks.push_back(std::move(y));
    }
    return out;
}

std::vector<CMatrixXd> schedule_covariances(const NetworkScenario& s, const std::vector<int>& users, int bs) {
    std::vector<CMatrixXd> covs;
    covs.push_back(s.covariance(bs, users[bs], bs));
    for (int cell = 0; cell < s.num_cells; ++cell)
        if (cell != bs) covs.push_back(s.covariance(cell, users[cell], bs));
    return covs;
}

}  // namespace

// --- metrics -----------------------------------------------------------------

void ErrorAccumulator::add(const CVectorXd& estimate, const CVectorXd& truth) {
    if (estimate.size() != truth.size()) throw DomainError("normalized_error: estimate/truth length mismatch");
    num_ += (estimate - truth).squaredNorm();
    den_ += truth.squaredNorm();
}

void ErrorAccumulator::add_sums(double error_energy, double channel_energy) {
    num_ += error_energy;
    den_ += channel_energy;
}

double ErrorAccumulator::db() const {
    if (!(den_ > 0)) throw DomainError("normalized_error: true channels have zero energy");
    if (num_ <= 0) return kErrorFloorDb;
    return std::max(kErrorFloorDb, 10.0 * std::log10(num_ / den_));
}

double normalized_error(std::span<const std::pair<CVectorXd, CVectorXd>> pairs) {
    if (pairs.empty()) throw DomainError("normalized_error: need at least one pair");
    ErrorAccumulator acc;
    for (const auto& [estimate, truth] : pairs) acc.add(estimate, truth);
    return acc.db();
}

RateReport mrc_rate(std::span<const CVectorXd> estimates, const std::vector<std::vector<CVectorXd>>& cross,
                    double noise_var) {
    const auto l_cells = static_cast<int>(estimates.size());
    if (l_cells == 0) throw DomainError("mrc_rate: need at least one cell");
    if (static_cast<int>(cross.size()) != l_cells) throw DomainError("mrc_rate: cross-channel table must be L x L");
    std::vector<CVectorXd> beams(l_cells);
    RateReport report;
    for (int j = 0; j < l_cells; ++j) {
        if (static_cast<int>(cross[j].size()) != l_cells) throw DomainError("mrc_rate: cross-channel table must be L x L");
        const double n = estimates[j].norm();
        if (n > 0) beams[j] = estimates[j] / n;
        else {
            beams[j] = CVectorXd::Zero(estimates[j].size());
            ++report.undefined_beams;
        }
    }
    report.sinr.resize(l_cells);
    double sum = 0.0;
    for (int j = 0; j < l_cells; ++j) {
        if (estimates[j].norm() == 0) {
            report.sinr[j] = 0.0;
            continue;
        }
        const double signal = std::norm(cross[j][j].dot(beams[j]));
        double interference = 0.0;
        for (int l = 0; l < l_cells; ++l)
            if (l != j) interference += std::norm(cross[l][j].dot(beams[l]));
        report.sinr[j] = signal / (noise_var + interference);
        sum += std::log2(1.0 + report.sinr[j]);
    }
    report.rate = sum / l_cells;
    return report;
}

// --- sweep -------------------------------------------------------------------

int sweep_size(const ExperimentConfig& c) {
    return static_cast<int>(c.sweep == SweepVariable::Antennas ? c.antennas.size() : c.sigmas_deg.size());
}

double sweep_value(const ExperimentConfig& c, int point) {
    return c.sweep == SweepVariable::Antennas ? double(c.antennas.at(point)) : c.sigmas_deg.at(point);
}

NetworkScenario trial_scenario(const ExperimentConfig& c, int point, int trial) {
    // keyed by trial only: every sweep point sees the same user layout
    auto rng = substream(c.seed, {kScenarioStream, std::uint64_t(trial)});
    NetworkScenario s = build_scenario(scenario_params(c, antennas_at(c, point)), rng);
    QuadratureSpec quad;
    quad.num_nodes = c.quadrature_nodes;
    attach_covariances(s, spread_at(c, point), quad);
    return s;
}

TrialResult run_trial(const ExperimentConfig& c, int point, int trial) {
    TrialResult result;
    result.point = point;
    result.trial = trial;
    result.seed = c.seed;

    const NetworkScenario s = trial_scenario(c, point, trial);
    const AngularSpread spread = spread_at(c, point);
    const int l_cells = s.num_cells;
    const int m = s.geometry.num_antennas;
    const auto pilot = PilotSequence<double>::all_ones(s.pilot_len);

    auto sched = substream(c.seed, {kScheduleStream, std::uint64_t(trial)});
    std::uniform_int_distribution<int> pick(0, s.users_per_cell - 1);
    for (int l = 0; l < l_cells; ++l) result.random_users.push_back(pick(sched));

    const bool need_random = c.uses(Estimator::LS) || c.uses(Estimator::CB);
    const bool need_greedy = c.uses(Estimator::CPA) || c.uses(Estimator::NoInt);
    if (need_greedy) result.greedy_users.resize(l_cells);
    if (need_greedy) {
        const AssignmentState state = greedy_assign(s);
        for (const auto& sel : state.selected()) result.greedy_users[sel.cell] = sel.user;
    }

    // noise at each base station, shared by every estimator
    std::vector<CMatrixXd> noise;
    for (int bs = 0; bs < l_cells; ++bs) {
        auto rng = substream(c.seed, {kNoiseStream, std::uint64_t(point), std::uint64_t(trial), std::uint64_t(bs)});
        CMatrixXd n(m, s.pilot_len);
        for (int t = 0; t < s.pilot_len; ++t)
            for (int i = 0; i < m; ++i) n(i, t) = complex_gaussian(rng, s.noise_var);
        noise.push_back(std::move(n));
    }

    auto evaluate = [&](const std::vector<int>& users, std::initializer_list<Estimator> which) {
        const auto g = draw_schedule_channels(c, s, spread, trial, users);
        const ScheduleSignals sig = received_signals(s, g, pilot, noise);
        for (Estimator e : which) {
            if (!c.uses(e)) continue;
            EstimatorOutcome out{e, {}, {}, {}};
            for (int bs = 0; bs < l_cells; ++bs) {
                CVectorXd est;
                switch (e) {
                    case Estimator::LS: est = ls_estimate(sig.blocks[bs], pilot); break;
                    case Estimator::CB:
                    case Estimator::CPA: {
                        const auto covs = schedule_covariances(s, users, bs);
                        est = single_mmse_estimate<double>(sig.received[bs], pilot, covs, s.noise_var);
                        break;
                    }
                    case Estimator::NoInt:
                        est = no_interference_estimate<double>(sig.clean[bs], pilot, s.covariance(bs, users[bs], bs),
                                                               s.noise_var);
                        break;
                }
                out.estimates.push_back(std::move(est));
                out.truths.push_back(g[bs][bs]);
            }
            // no-int is a reference for estimation error; its beams see the full interference
            out.rate = mrc_rate(out.estimates, g, s.noise_var);
            result.outcomes.push_back(std::move(out));
        }
    };
    if (need_random) evaluate(result.random_users, {Estimator::LS, Estimator::CB});
    if (need_greedy) evaluate(result.greedy_users, {Estimator::CPA, Estimator::NoInt});
    return result;
}

std::vector<AggregateRow> run_sweep(const ExperimentConfig& c) {
    c.validate();
    constexpr int kEstimators = 4;
    struct Sums {
        double num[kEstimators]{};
        double den[kEstimators]{};
        double rate[kEstimators]{};
    };
    const int points = sweep_size(c);
    std::vector<AggregateRow> rows;
    for (int p = 0; p < points; ++p) {
        std::vector<Sums> per_trial(c.trials);
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (int t = next++; t < c.trials; t = next++) {
                const TrialResult r = run_trial(c, p, t);
                Sums& sums = per_trial[t];
                for (const auto& o : r.outcomes) {
                    const int k = static_cast<int>(o.estimator);
                    for (std::size_t j = 0; j < o.estimates.size(); ++j) {
                        sums.num[k] += (o.estimates[j] - o.truths[j]).squaredNorm();
                        sums.den[k] += o.truths[j].squaredNorm();
                    }
                    sums.rate[k] += o.rate.rate;
                }
            }
        };
        const int workers = std::max(1, std::min(c.threads, c.trials));
        if (workers == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        // reduce in trial order so results do not depend on scheduling
        for (Estimator e : kAllEstimators) {
            if (!c.uses(e)) continue;
            const int k = static_cast<int>(e);
            ErrorAccumulator acc;
            double rate = 0.0;
            for (const Sums& s : per_trial) {
                acc.add_sums(s.num[k], s.den[k]);
                rate += s.rate[k];
            }
            rows.push_back({sweep_value(c, p), e, acc.db(), rate / c.trials, c.trials, c.seed});
        }
    }
    return rows;
}

std::string format_csv(std::span<const AggregateRow> rows) {
    std::string out = "sweep_var,estimator,err_db,rate_bps_hz,trials,seed\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6g,%s,%.6g,%.6g,%d,%llu\n", r.sweep_value, estimator_label(r.estimator),
                      r.err_db, r.rate_bps_hz, r.trials, static_cast<unsigned long long>(r.seed));
        out += buf;
    }
    return out;
}

void emit_csv(std::span<const AggregateRow> rows, const std::string& path) {
    if (rows.empty()) throw DomainError("emit_csv: no results to write");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out << format_csv(rows);
    if (!out) throw IoError(path, "write failed");
}

}  // namespace pilotcov
