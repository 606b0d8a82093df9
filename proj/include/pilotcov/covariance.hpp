// SPDX-License-Identifier: Apache-2.0
//
// Channel covariance R = delta^2 * E{a(theta) a(theta)^H} for a ULA.
//
// R is Hermitian Toeplitz: entry (m, n) only depends on the lag m - n, so the
// quadrature evaluates the M lags r_k = delta^2 * E{exp(-j 2 pi (D/lambda) k cos theta)}
// and expands them.
#pragma once

#include <algorithm>
#include <cmath>
#include <variant>

#include <Eigen/Eigenvalues>

#include "pilotcov/channel_model.hpp"
#include "pilotcov/quadrature.hpp"

namespace pilotcov {

template <typename Real = double>
struct CovarianceMatrix {
    CMatrix<Real> entries;
    Real scale = 0;  // delta^2

    int size() const { return static_cast<int>(entries.rows()); }
};

struct QuadratureSpec {
    /// Minimum node count. Raised automatically when the lag phase
    /// oscillates faster than the rule can resolve (large M, wide support).
    int num_nodes = 512;
    /// Gaussian densities are integrated over mean +/- this many stddevs.
    double gaussian_truncation = 6.0;
};

namespace detail {

/// Node count that resolves exp(i * omega * t) on [-1, 1] to roundoff.
inline int resolved_node_count(int requested, double omega) {
    return std::max(requested, static_cast<int>(std::ceil(0.6 * omega)) + 32);
}

template <typename Real>
CMatrix<Real> toeplitz_from_lags(const CVector<Real>& lags) {
    const Eigen::Index m = lags.size();
    CMatrix<Real> r(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            r(i, j) = i >= j ? lags(i - j) : std::conj(lags(j - i));
        }
    }
    return r;
}

}  // namespace detail

template <typename Real>
CovarianceMatrix<Real> covariance_from_density(const ArrayGeometry<Real>& geom, const AoaDensity<Real>& density,
                                               Real delta_sq, const QuadratureSpec& quad = {}) {
    if (quad.num_nodes < 32) throw DomainError("covariance_from_density: num_nodes must be >= 32");
    const int m = geom.num_antennas;
    const Real phase_rate = 2 * kPi<Real> * geom.spacing_ratio;

    if (const auto* p = std::get_if<PointAoa<Real>>(&density.variant())) {
        const CVector<Real> a = steering_vector(geom, p->angle);
        return {delta_sq * a * a.adjoint(), delta_sq};
    }

    Real lo{};
    Real hi{};
    bool gaussian = false;
    Real mu{};
    Real sigma{};
    if (const auto* u = std::get_if<UniformAoa<Real>>(&density.variant())) {
        lo = u->mean - u->half_width;
        hi = u->mean + u->half_width;
    } else {
        const auto& g = std::get<GaussianAoa<Real>>(density.variant());
        gaussian = true;
        mu = g.mean;
        sigma = g.stddev;
        lo = mu - Real(quad.gaussian_truncation) * sigma;
        hi = mu + Real(quad.gaussian_truncation) * sigma;
    }

    const Real center = (lo + hi) / 2;
    const Real half = (hi - lo) / 2;
    const double omega = double(phase_rate) * double(m - 1) * double(half);
    const GaussLegendreRule& rule = gauss_legendre(detail::resolved_node_count(quad.num_nodes, omega));

    CVector<Real> lags = CVector<Real>::Zero(m);
    Real mass = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const Real theta = center + half * Real(rule.nodes[i]);
        Real w = Real(rule.weights[i]);
        if (gaussian) {
            const Real z = (theta - mu) / sigma;
            w *= std::exp(-z * z / 2);
        }
        mass += w;
        const Complex<Real> step = std::polar(Real(1), -phase_rate * std::cos(theta));
        Complex<Real> phasor(1);
        for (int k = 0; k < m; ++k) {
            lags(k) += w * phasor;
            phasor *= step;
        }
    }
    lags *= delta_sq / mass;
    lags(0) = Complex<Real>(std::real(lags(0)));
    return {detail::toeplitz_from_lags(lags), delta_sq};
}

/// Sample mean of delta^2 a(theta) a(theta)^H over `num_samples` draws.
template <typename Real, typename Rng>
CovarianceMatrix<Real> covariance_monte_carlo(const ArrayGeometry<Real>& geom, const AoaDensity<Real>& density,
                                              Real delta_sq, long num_samples, Rng& rng) {
    if (num_samples < 1) throw DomainError("covariance_monte_carlo: num_samples must be >= 1");
    const int m = geom.num_antennas;
    CMatrix<Real> acc = CMatrix<Real>::Zero(m, m);
    for (long s = 0; s < num_samples; ++s) {
        const CVector<Real> a = steering_vector(geom, density.sample(rng));
        acc.noalias() += a * a.adjoint();
    }
    acc *= delta_sq / Real(num_samples);
    return {acc, delta_sq};
}

template <typename Real = double>
struct PsdReport {
    bool ok = false;
    Real hermitian_error = 0;  // ||R - R^H||_F / ||R||_F
    Real min_eigenvalue = 0;
    Real tolerance = 0;        // eigenvalue floor, 1e-10 * trace
};

template <typename Derived>
auto validate_psd(const Eigen::MatrixBase<Derived>& r) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    if (r.rows() != r.cols()) throw DomainError("validate_psd: matrix must be square");
    PsdReport<Real> report;
    const Real norm = r.norm();
    report.hermitian_error = norm > 0 ? (r - r.adjoint()).norm() / norm : Real(0);
    report.tolerance = Real(1e-10) * std::abs(real_trace(r));
    if (r.rows() == 0) {
        report.ok = true;
        return report;
    }
    using Plain = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Plain herm = (r + r.adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<Plain> solver(herm, Eigen::EigenvaluesOnly);
    report.min_eigenvalue = solver.eigenvalues().minCoeff();
    report.ok = report.hermitian_error <= Real(1e-10) && report.min_eigenvalue >= -report.tolerance;
    return report;
}

template <typename Real>
PsdReport<Real> validate_psd(const CovarianceMatrix<Real>& r) {
    return validate_psd(r.entries);
}

}  // namespace pilotcov
