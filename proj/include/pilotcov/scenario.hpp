// SPDX-License-Identifier: Apache-2.0
//
// Multi-cell layout: base stations on a hexagonal grid, single-antenna users
// on a ring around their serving base station, and the per-(cell, user,
// base station) link table with cached covariances.
#pragma once

#include <optional>
#include <random>
#include <vector>

#include "pilotcov/covariance.hpp"

namespace pilotcov {

struct LinkGeometry {
    double distance = 0;   // meters
    double mean_aoa = 0;   // folded into [0, pi]
    double delta_sq = 0;   // path-loss gain relative to noise_var
};

/// AOA spread shared by every link: uniform half width or Gaussian stddev, radians.
struct AngularSpread {
    enum class Kind { Uniform, Gaussian };
    Kind kind = Kind::Uniform;
    double width = 0;

    static AngularSpread uniform(double half_width) { return {Kind::Uniform, half_width}; }
    static AngularSpread gaussian(double stddev) { return {Kind::Gaussian, stddev}; }

    AoaDensity<double> around(double mean) const {
        return kind == Kind::Uniform ? AoaDensity<double>::uniform(mean, width)
                                     : AoaDensity<double>::gaussian(mean, width);
    }
};

struct ScenarioParams {
    int num_cells = 2;
    int users_per_cell = 10;
    double cell_radius = 1000.0;
    double user_distance = 800.0;
    double pathloss_exponent = 3.0;
    double edge_snr_db = 20.0;
    int pilot_len = 10;
    ArrayGeometry<double> geometry{10, 0.5};
    /// Places every user at this bearing from its base station instead of a
    /// uniformly drawn one.
    std::optional<double> fixed_user_angle;
};

struct NetworkScenario {
    int num_cells = 0;
    int users_per_cell = 0;
    double cell_radius = 0;
    double user_distance = 0;
    double pathloss_exponent = 0;
    double pathloss_constant = 0;
    double noise_var = 1.0;
    int pilot_len = 0;
    ArrayGeometry<double> geometry;

    std::vector<Eigen::Vector2d> base_stations;
    std::vector<Eigen::Vector2d> users;  // index cell * K + user
    std::vector<LinkGeometry> links;     // index (cell * K + user) * L + bs
    std::vector<CMatrixXd> covariances;  // same indexing as links; empty until attached

    std::size_t link_index(int cell, int user, int bs) const {
        return (std::size_t(cell) * users_per_cell + user) * num_cells + bs;
    }
    const LinkGeometry& link(int cell, int user, int bs) const { return links.at(link_index(cell, user, bs)); }

    bool has_covariances() const { return !covariances.empty(); }
    /// Covariance of user `user` of cell `cell` as seen by base station `bs`.
    const CMatrixXd& covariance(int cell, int user, int bs) const;
};

/// Lays out L in {2, 7} hexagonal cells and draws user bearings.
NetworkScenario build_scenario(const ScenarioParams& params, std::mt19937_64& rng);

/// Fills the covariance cache for all K L^2 links.
void attach_covariances(NetworkScenario& scenario, const AngularSpread& spread, const QuadratureSpec& quad = {});

/// Multipath draw for one link, using the link's mean AOA and path loss.
CVectorXd draw_link_channel(const NetworkScenario& scenario, const AngularSpread& spread, int num_paths, int cell,
                            int user, int bs, std::mt19937_64& rng);

}  // namespace pilotcov
