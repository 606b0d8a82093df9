// SPDX-License-Identifier: Apache-2.0
#include "pilotcov/pilot_coordinator.hpp"

#include <algorithm>
#include <string>

#include "pilotcov/estimators.hpp"

namespace pilotcov {

void AssignmentState::add(int cell, int user) {
    if (user < 0 || user >= users_per_cell_) throw DomainError("AssignmentState: user index out of range");
    if (user_of(cell) >= 0) throw DomainError("AssignmentState: cell already has a selected user");
    selected_.push_back({cell, user});
}

AssignmentState AssignmentState::with(int cell, int user) const {
    AssignmentState next = *this;
    next.add(cell, user);
    return next;
}

int AssignmentState::user_of(int cell) const {
    for (const auto& s : selected_)
        if (s.cell == cell) return s.user;
    return -1;
}

double cell_mse(const AssignmentState& state, const NetworkScenario& scenario, int target) {
    const int target_user = state.user_of(target);
    if (target_user < 0) throw DomainError("cell_mse: target cell has no selected user");
    std::vector<CMatrixXd> covs;
    covs.reserve(state.size());
    covs.push_back(scenario.covariance(target, target_user, target));
    for (const auto& s : state.selected())
        if (s.cell != target) covs.push_back(scenario.covariance(s.cell, s.user, target));
    return analytic_mse_single<double>(covs, scenario.noise_var, scenario.pilot_len);
}

double network_utility(const AssignmentState& state, const NetworkScenario& scenario) {
    if (state.empty()) throw DomainError("network_utility: empty assignment");
    double f = 0.0;
    for (const auto& s : state.selected()) {
        const double trace = real_trace(scenario.covariance(s.cell, s.user, s.cell));
        f += cell_mse(state, scenario, s.cell) / trace;
    }
    return f;
}

AssignmentState greedy_assign(const NetworkScenario& scenario) {
    AssignmentState state(scenario.users_per_cell);
    for (int l = 0; l < scenario.num_cells; ++l) {
        int best_user = 0;
        double best = network_utility(state.with(l, 0), scenario);
        for (int k = 1; k < scenario.users_per_cell; ++k) {
            const double f = network_utility(state.with(l, k), scenario);
            if (f < best) {
                best = f;
                best_user = k;
            }
        }
        state.add(l, best_user);
    }
    return state;
}

AssignmentState exhaustive_assign(const NetworkScenario& scenario, long max_combinations) {
    const int l_cells = scenario.num_cells;
    const int k_users = scenario.users_per_cell;
    long combos = 1;
    for (int l = 0; l < l_cells; ++l) {
        combos *= k_users;
        if (combos > max_combinations)
            throw DomainError("exhaustive_assign: " + std::to_string(k_users) + "^" + std::to_string(l_cells) +
                              " assignments exceed the search budget");
    }

    // odometer over (K_1, ..., K_L), last cell fastest: lexicographic order
    std::vector<int> pick(l_cells, 0);
    std::vector<int> best_pick = pick;
    double best = 0.0;
    bool first = true;
    for (long n = 0; n < combos; ++n) {
        AssignmentState state(k_users);
        for (int l = 0; l < l_cells; ++l) state.add(l, pick[l]);
        const double f = network_utility(state, scenario);
        if (first || f < best) {
            best = f;
            best_pick = pick;
            first = false;
        }
        for (int l = l_cells - 1; l >= 0; --l) {
            if (++pick[l] < k_users) break;
            pick[l] = 0;
        }
    }
    AssignmentState result(k_users);
    for (int l = 0; l < l_cells; ++l) result.add(l, best_pick[l]);
    return result;
}

}  // namespace pilotcov
