// SPDX-License-Identifier: Apache-2.0
//
// Large-array subspace structure of ULA covariances: the Fourier-type basis
// alpha(x_i)/sqrt(M), numerical dimension of spans of alpha(x), effective
// rank, leakage of off-support steering directions, and subspace overlap.
//
// Ranks are counted against a relative cutoff: eigenvalues below
// kDefaultRankThreshold * lambda_max are treated as null.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Eigenvalues>

#include "pilotcov/covariance.hpp"

namespace pilotcov {

inline constexpr double kDefaultRankThreshold = 1e-3;

/// alpha(x) = [1, e^{-j pi x}, ..., e^{-j pi (M-1) x}]^T.
template <typename Real>
CVector<Real> spatial_response(int num_antennas, Real x) {
    CVector<Real> v(num_antennas);
    for (int m = 0; m < num_antennas; ++m) v(m) = std::polar(Real(1), -kPi<Real> * x * Real(m));
    return v;
}

/// Columns mu_i = alpha(x_i) / sqrt(M), x_i = -1 + 2 i / M, i = 0..M-1.
template <typename Real = double>
CMatrix<Real> fourier_basis(int num_antennas) {
    detail::require(num_antennas >= 1, "fourier_basis: M must be >= 1");
    CMatrix<Real> basis(num_antennas, num_antennas);
    const Real norm = std::sqrt(Real(num_antennas));
    for (int i = 0; i < num_antennas; ++i)
        basis.col(i) = spatial_response<Real>(num_antennas, Real(-1) + Real(2 * i) / Real(num_antennas)) / norm;
    return basis;
}

/// Dominant eigenpairs of a Hermitian PSD matrix, eigenvalues nonincreasing.
template <typename Real = double>
struct SpectralDecomposition {
    CMatrix<Real> eigvecs;
    RVector<Real> eigvals;
    Real threshold = Real(kDefaultRankThreshold);

    int rank() const { return static_cast<int>(eigvals.size()); }
};

template <typename Derived>
auto dominant_subspace(const Eigen::MatrixBase<Derived>& r,
                       typename Eigen::NumTraits<typename Derived::Scalar>::Real threshold = kDefaultRankThreshold) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    detail::require(r.rows() == r.cols(), "dominant_subspace: matrix must be square");
    const CMatrix<Real> herm = (r + r.adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(herm);
    const auto& vals = solver.eigenvalues();  // ascending
    const Eigen::Index n = vals.size();
    const Real top = n > 0 ? vals(n - 1) : Real(0);
    SpectralDecomposition<Real> out;
    out.threshold = threshold;
    if (!(top > 0)) {
        out.eigvecs.resize(r.rows(), 0);
        return out;
    }
    Eigen::Index keep = 0;
    while (keep < n && vals(n - 1 - keep) >= threshold * top) ++keep;
    out.eigvecs.resize(r.rows(), keep);
    out.eigvals.resize(keep);
    for (Eigen::Index i = 0; i < keep; ++i) {
        out.eigvals(i) = vals(n - 1 - i);
        out.eigvecs.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

/// Numerical dimension of span{alpha(x), x in [b1, b2]}: eigenvalue count of
/// the grid-averaged Gram matrix above the rank threshold. Tracks
/// (b2 - b1) M / 2 up to an o(M) transition band.
template <typename Real = double>
int subspace_dimension_estimate(Real b1, Real b2, int num_antennas, int grid_size = 0,
                                Real threshold = Real(kDefaultRankThreshold)) {
    detail::require(Real(-1) <= b1 && b1 < b2 && b2 <= Real(1), "subspace_dimension_estimate: need -1 <= b1 < b2 <= 1");
    detail::require(num_antennas >= 1, "subspace_dimension_estimate: M must be >= 1");
    if (grid_size <= 0) grid_size = std::max(8 * num_antennas, 256);
    CMatrix<Real> samples(num_antennas, grid_size);
    const Real step = (b2 - b1) / Real(grid_size);
    for (int g = 0; g < grid_size; ++g)
        samples.col(g) = spatial_response<Real>(num_antennas, b1 + (Real(g) + Real(0.5)) * step);
    const CMatrix<Real> gram = samples * samples.adjoint() / Real(grid_size);
    return dominant_subspace(gram, threshold).rank();
}

template <typename Real = double>
int effective_rank(const CMatrix<Real>& r, Real threshold = Real(kDefaultRankThreshold)) {
    return dominant_subspace(r, threshold).rank();
}

/// (cos theta_min - cos theta_max) * D / lambda for a bounded support; empty
/// for unbounded (Gaussian) densities.
template <typename Real>
std::optional<Real> support_rank_fraction(const AoaDensity<Real>& density, const ArrayGeometry<Real>& geom) {
    const auto support = density.folded_support();
    if (!support) return std::nullopt;
    return (std::cos(support->theta_min) - std::cos(support->theta_max)) * geom.spacing_ratio;
}

template <typename Real = double>
struct RankReport {
    int rank = 0;
    std::optional<Real> support_fraction;  // d_i
    std::optional<Real> bound;             // d_i * M
};

template <typename Real>
RankReport<Real> effective_rank(const CovarianceMatrix<Real>& r, const AoaDensity<Real>& density,
                                const ArrayGeometry<Real>& geom, Real threshold = Real(kDefaultRankThreshold)) {
    RankReport<Real> report;
    report.rank = effective_rank(r.entries, threshold);
    report.support_fraction = support_rank_fraction(density, geom);
    if (report.support_fraction) report.bound = *report.support_fraction * Real(geom.num_antennas);
    return report;
}

/// a(phi)^H R a(phi) / (delta^2 M^2): the energy R puts along the unit
/// steering direction a(phi)/sqrt(M), per unit of a single in-support path
/// (equals 1 when R is a point mass at phi, tends to 0 for phi off-support).
template <typename Real>
Real steering_null_projection(const CMatrix<Real>& r, const ArrayGeometry<Real>& geom, Real phi, Real delta_sq) {
    detail::require(r.rows() == geom.num_antennas && r.cols() == geom.num_antennas,
                    "steering_null_projection: R must be M x M");
    detail::require(delta_sq > 0, "steering_null_projection: delta_sq must be > 0");
    const CVector<Real> a = steering_vector(geom, phi);
    const Real m = Real(geom.num_antennas);
    return std::real(a.dot(r * a)) / (delta_sq * m * m);
}

/// ||U_a^H U_b||_F / sqrt(min(m_a, m_b)) over the dominant eigenvectors.
/// Exactly symmetric in its arguments.
template <typename Real>
Real subspace_overlap(const CMatrix<Real>& r_a, const CMatrix<Real>& r_b,
                      Real threshold = Real(kDefaultRankThreshold)) {
    detail::require(r_a.rows() == r_b.rows(), "subspace_overlap: matrices must share M");
    const auto a = dominant_subspace(r_a, threshold);
    const auto b = dominant_subspace(r_b, threshold);
    if (a.rank() == 0 || b.rank() == 0) throw DomainError("subspace_overlap: zero matrix has no signal subspace");
    const Real ab = (a.eigvecs.adjoint() * b.eigvecs).norm();
    const Real ba = (b.eigvecs.adjoint() * a.eigvecs).norm();
    return std::min(Real(1), (ab + ba) / 2 / std::sqrt(Real(std::min(a.rank(), b.rank()))));
}

}  // namespace pilotcov
