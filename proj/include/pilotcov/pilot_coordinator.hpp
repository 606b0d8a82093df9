// SPDX-License-Identifier: Apache-2.0
//
// Coordinated assignment of one shared pilot to one user per cell, scored by
// the normalized sum of per-cell single-channel MSEs.
#pragma once

#include <vector>

#include "pilotcov/scenario.hpp"

namespace pilotcov {

struct Selection {
    int cell = 0;
    int user = 0;
};

/// Users holding the shared pilot, in selection order; at most one per cell.
class AssignmentState {
public:
    explicit AssignmentState(int users_per_cell) : users_per_cell_(users_per_cell) {}

    void add(int cell, int user);
    AssignmentState with(int cell, int user) const;

    const std::vector<Selection>& selected() const { return selected_; }
    int users_per_cell() const { return users_per_cell_; }
    std::size_t size() const { return selected_.size(); }
    bool empty() const { return selected_.empty(); }
    /// Selected user of `cell`, or -1.
    int user_of(int cell) const;

    friend bool operator==(const AssignmentState& a, const AssignmentState& b) {
        if (a.users_per_cell_ != b.users_per_cell_ || a.selected_.size() != b.selected_.size()) return false;
        for (std::size_t i = 0; i < a.selected_.size(); ++i)
            if (a.selected_[i].cell != b.selected_[i].cell || a.selected_[i].user != b.selected_[i].user) return false;
        return true;
    }

private:
    int users_per_cell_;
    std::vector<Selection> selected_;
};

/// MSE of the desired channel at the base station of selected cell `target`,
/// interference coming from every other selected user.
double cell_mse(const AssignmentState& state, const NetworkScenario& scenario, int target);

/// F(U) = sum over selected cells j of M_j(U) / tr R_jj(U).
double network_utility(const AssignmentState& state, const NetworkScenario& scenario);

/// Cells in index order; each takes the user minimizing F of the grown set
/// (ties go to the smallest user index).
AssignmentState greedy_assign(const NetworkScenario& scenario);

/// Global minimizer of F over all K^L assignments; ties go to the
/// lexicographically smallest (K_1, ..., K_L). Refuses K^L above `max_combinations`.
AssignmentState exhaustive_assign(const NetworkScenario& scenario, long max_combinations = 100000);

}  // namespace pilotcov
