// SPDX-License-Identifier: Apache-2.0
#include "pilotcov/scenario.hpp"

#include <cmath>

namespace pilotcov {
namespace {

std::vector<Eigen::Vector2d> hexagonal_sites(int num_cells, double cell_radius) {
    const double isd = std::sqrt(3.0) * cell_radius;
    std::vector<Eigen::Vector2d> sites{Eigen::Vector2d::Zero()};
    if (num_cells == 2) {
        sites.emplace_back(isd, 0.0);
    } else {
        for (int k = 0; k < 6; ++k) {
            const double phi = deg2rad(30.0 + 60.0 * k);
            sites.emplace_back(isd * std::cos(phi), isd * std::sin(phi));
        }
    }
    return sites;
}

}  // namespace

const CMatrixXd& NetworkScenario::covariance(int cell, int user, int bs) const {
    if (covariances.empty()) throw DomainError("NetworkScenario: covariances not attached");
    return covariances.at(link_index(cell, user, bs));
}

NetworkScenario build_scenario(const ScenarioParams& p, std::mt19937_64& rng) {
    if (p.num_cells != 2 && p.num_cells != 7) throw ConfigError("cells", "supported layouts are 2 and 7 cells");
    if (p.users_per_cell < 1) throw ConfigError("users_per_cell", "must be >= 1");
    if (!(p.cell_radius > 0)) throw ConfigError("cell_radius_m", "must be > 0");
    if (!(p.user_distance > 0) || p.user_distance > p.cell_radius)
        throw ConfigError("user_distance_m", "must lie in (0, cell_radius]");
    if (p.pilot_len < 1) throw ConfigError("pilot_len", "must be >= 1");

    NetworkScenario s;
    s.num_cells = p.num_cells;
    s.users_per_cell = p.users_per_cell;
    s.cell_radius = p.cell_radius;
    s.user_distance = p.user_distance;
    s.pathloss_exponent = p.pathloss_exponent;
    s.noise_var = 1.0;
    s.pilot_len = p.pilot_len;
    s.geometry = p.geometry;
    // edge user at distance cell_radius sees edge_snr * noise_var
    s.pathloss_constant = std::pow(10.0, p.edge_snr_db / 10.0) * s.noise_var * std::pow(p.cell_radius, p.pathloss_exponent);
    s.base_stations = hexagonal_sites(p.num_cells, p.cell_radius);

    std::uniform_real_distribution<double> bearing(0.0, 2.0 * std::numbers::pi);
    s.users.reserve(std::size_t(p.num_cells) * p.users_per_cell);
    for (int l = 0; l < p.num_cells; ++l) {
        for (int u = 0; u < p.users_per_cell; ++u) {
            const double psi = p.fixed_user_angle ? *p.fixed_user_angle : bearing(rng);
            s.users.push_back(s.base_stations[l] + p.user_distance * Eigen::Vector2d(std::cos(psi), std::sin(psi)));
        }
    }

    s.links.resize(std::size_t(p.users_per_cell) * p.num_cells * p.num_cells);
    for (int l = 0; l < p.num_cells; ++l) {
        for (int u = 0; u < p.users_per_cell; ++u) {
            const Eigen::Vector2d& pos = s.users[std::size_t(l) * p.users_per_cell + u];
            for (int j = 0; j < p.num_cells; ++j) {
                const Eigen::Vector2d d = pos - s.base_stations[j];
                LinkGeometry& link = s.links[s.link_index(l, u, j)];
                link.distance = d.norm();
                link.mean_aoa = fold_angle(std::atan2(d.y(), d.x()));
                link.delta_sq = path_loss(s.pathloss_constant, link.distance, s.pathloss_exponent);
            }
        }
    }
    return s;
}

void attach_covariances(NetworkScenario& scenario, const AngularSpread& spread, const QuadratureSpec& quad) {
    scenario.covariances.clear();
    scenario.covariances.reserve(scenario.links.size());
    for (const auto& link : scenario.links) {
        scenario.covariances.push_back(
            covariance_from_density(scenario.geometry, spread.around(link.mean_aoa), link.delta_sq, quad).entries);
    }
}

CVectorXd draw_link_channel(const NetworkScenario& scenario, const AngularSpread& spread, int num_paths, int cell,
                            int user, int bs, std::mt19937_64& rng) {
    const LinkGeometry& link = scenario.link(cell, user, bs);
    const PathProfile<double> profile(num_paths, link.delta_sq, spread.around(link.mean_aoa));
    return draw_channel(profile, scenario.geometry, rng);
}

}  // namespace pilotcov
