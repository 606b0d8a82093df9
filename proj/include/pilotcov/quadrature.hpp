// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace pilotcov {

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Returns the n-point rule. Rules are computed once per n and shared;
/// the returned reference stays valid for the life of the program.
const GaussLegendreRule& gauss_legendre(int n);

}  // namespace pilotcov
