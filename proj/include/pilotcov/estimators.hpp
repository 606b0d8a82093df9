// SPDX-License-Identifier: Apache-2.0
//
// Pilot-based channel estimators for a target base station receiving
// Y = sum_l h_l s_l^T + N (M x tau), and their closed-form MSEs.
//
// Stacked quantities follow y = vec(Y) (column-major) = S h + n with
// S = [s_1 (x) I_M ... s_L (x) I_M] and h = [h_1; ...; h_L].
//
// All solves go through Eigen decompositions; no matrix is ever inverted
// explicitly. Every system matrix carries a noise_var * I term, so
// noise_var must be strictly positive.
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "pilotcov/channel_model.hpp"

namespace pilotcov {

/// Pilot of length tau with total power sum |s_t|^2 = tau.
template <typename Real = double>
class PilotSequence {
public:
    explicit PilotSequence(CVector<Real> symbols) : symbols_(std::move(symbols)) {
        const Real tau = Real(symbols_.size());
        if (symbols_.size() == 0) throw DomainError("PilotSequence: empty pilot");
        if (std::abs(symbols_.squaredNorm() - tau) > Real(1e-10) * tau)
            throw DomainError("PilotSequence: power must equal the pilot length");
    }

    static PilotSequence all_ones(int tau) { return PilotSequence(CVector<Real>::Ones(tau)); }

    /// Complex Gaussian draw rescaled to the power constraint.
    template <typename Rng>
    static PilotSequence random(int tau, Rng& rng) {
        CVector<Real> s(tau);
        for (int t = 0; t < tau; ++t) s(t) = complex_gaussian(rng, Real(1));
        s *= std::sqrt(Real(tau)) / s.norm();
        return PilotSequence(std::move(s));
    }

    int length() const { return static_cast<int>(symbols_.size()); }
    const CVector<Real>& symbols() const { return symbols_; }

private:
    CVector<Real> symbols_;
};

/// Pilots per cell, per-cell covariances at the target (index 0 is the
/// desired channel) and the noise variance.
template <typename Real = double>
struct EstimationProblem {
    std::vector<PilotSequence<Real>> pilots;
    std::vector<CMatrix<Real>> covariances;
    Real noise_var = 1;

    int num_cells() const { return static_cast<int>(covariances.size()); }
    int num_antennas() const { return covariances.empty() ? 0 : static_cast<int>(covariances.front().rows()); }
    int pilot_length() const { return pilots.empty() ? 0 : pilots.front().length(); }

    void validate() const {
        detail::require(!covariances.empty(), "EstimationProblem: need at least one cell");
        detail::require(pilots.size() == covariances.size(), "EstimationProblem: one pilot per cell required");
        detail::require(noise_var > 0, "EstimationProblem: noise_var must be > 0");
        const auto m = covariances.front().rows();
        for (const auto& r : covariances)
            detail::require(r.rows() == m && r.cols() == m, "EstimationProblem: covariances must share M");
        for (const auto& s : pilots)
            detail::require(s.length() == pilot_length(), "EstimationProblem: pilots must share tau");
    }
};

// --- received signal ---------------------------------------------------------

/// Y = sum_l h_l s_l^T + N with N i.i.d. CN(0, noise_var).
template <typename Real, typename Rng>
CMatrix<Real> simulate_received(std::span<const CVector<Real>> channels,
                                std::span<const PilotSequence<Real>> pilots, Real noise_var, Rng& rng) {
    detail::require(!channels.empty() && channels.size() == pilots.size(),
                    "simulate_received: need one pilot per channel");
    const auto m = channels.front().size();
    const int tau = pilots.front().length();
    CMatrix<Real> y = CMatrix<Real>::Zero(m, tau);
    for (std::size_t l = 0; l < channels.size(); ++l) {
        detail::require(channels[l].size() == m, "simulate_received: channel length mismatch");
        detail::require(pilots[l].length() == tau, "simulate_received: pilot length mismatch");
        y.noalias() += channels[l] * pilots[l].symbols().transpose();
    }
    if (noise_var > 0) {
        for (int t = 0; t < tau; ++t)
            for (Eigen::Index i = 0; i < m; ++i) y(i, t) += complex_gaussian(rng, noise_var);
    }
    return y;
}

template <typename Derived>
auto vectorize(const Eigen::MatrixBase<Derived>& y) {
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(y.size());
    Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>(v.data(), y.rows(), y.cols()) = y;
    return v;
}

/// (s (x) I_M)^H y for a stacked y of length M*tau; equals Y s^*.
template <typename Real>
CVector<Real> despread(const CVector<Real>& y, const PilotSequence<Real>& s, int num_antennas) {
    detail::require(y.size() == Eigen::Index(num_antennas) * s.length(), "despread: y must have length M*tau");
    const Eigen::Map<const CMatrix<Real>> block(y.data(), num_antennas, s.length());
    return block * s.symbols().conjugate();
}

/// S = [s_1 (x) I_M ... s_L (x) I_M], size (M tau) x (L M).
template <typename Real>
CMatrix<Real> stacked_pilot_matrix(std::span<const PilotSequence<Real>> pilots, int num_antennas) {
    const int tau = pilots.front().length();
    const auto l_cells = static_cast<int>(pilots.size());
    CMatrix<Real> s = CMatrix<Real>::Zero(Eigen::Index(num_antennas) * tau, Eigen::Index(num_antennas) * l_cells);
    for (int l = 0; l < l_cells; ++l)
        for (int t = 0; t < tau; ++t)
            s.block(Eigen::Index(t) * num_antennas, Eigen::Index(l) * num_antennas, num_antennas, num_antennas)
                .diagonal()
                .setConstant(pilots[l].symbols()(t));
    return s;
}

template <typename Real>
CMatrix<Real> block_diagonal(std::span<const CMatrix<Real>> blocks) {
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.rows();
    CMatrix<Real> out = CMatrix<Real>::Zero(n, n);
    Eigen::Index off = 0;
    for (const auto& b : blocks) {
        out.block(off, off, b.rows(), b.cols()) = b;
        off += b.rows();
    }
    return out;
}

// --- estimators --------------------------------------------------------------

/// Least squares: Y s^* / (s^T s^*).
template <typename Derived, typename Real>
CVector<Real> ls_estimate(const Eigen::MatrixBase<Derived>& y, const PilotSequence<Real>& s) {
    detail::require(y.cols() == s.length(), "ls_estimate: Y must have tau columns");
    const Real power = s.symbols().squaredNorm();
    detail::require(power > 0, "ls_estimate: zero pilot");
    return (y * s.symbols().conjugate()) / power;
}

/// MAP form: (noise_var I + R S^H S)^{-1} R S^H y, stacked over all L cells.
template <typename Real>
CVector<Real> joint_bayes_estimate(const CVector<Real>& y, const EstimationProblem<Real>& problem) {
    problem.validate();
    const int m = problem.num_antennas();
    detail::require(y.size() == Eigen::Index(m) * problem.pilot_length(), "joint_bayes_estimate: y length mismatch");
    const CMatrix<Real> s = stacked_pilot_matrix<Real>(problem.pilots, m);
    const CMatrix<Real> r = block_diagonal<Real>(problem.covariances);
    const CMatrix<Real> rsh = r * s.adjoint();
    CMatrix<Real> a = rsh * s;
    a.diagonal().array() += problem.noise_var;
    return a.partialPivLu().solve(rsh * y);
}

/// MMSE form: R S^H (S R S^H + noise_var I)^{-1} y. Equal to the MAP form.
template <typename Real>
CVector<Real> joint_mmse_estimate(const CVector<Real>& y, const EstimationProblem<Real>& problem) {
    problem.validate();
    const int m = problem.num_antennas();
    detail::require(y.size() == Eigen::Index(m) * problem.pilot_length(), "joint_mmse_estimate: y length mismatch");
    const CMatrix<Real> s = stacked_pilot_matrix<Real>(problem.pilots, m);
    const CMatrix<Real> r = block_diagonal<Real>(problem.covariances);
    CMatrix<Real> c = s * r * s.adjoint();
    c.diagonal().array() += problem.noise_var;
    return r * (s.adjoint() * c.ldlt().solve(y));
}

/// Desired channel only, one pilot s shared by every cell:
/// R_1 (noise_var I + tau sum_l R_l)^{-1} (s (x) I)^H y.
template <typename Real>
CVector<Real> single_mmse_estimate(const CVector<Real>& y, const PilotSequence<Real>& s,
                                   std::span<const CMatrix<Real>> covariances, Real noise_var) {
    detail::require(!covariances.empty(), "single_mmse_estimate: need the desired covariance");
    detail::require(noise_var > 0, "single_mmse_estimate: noise_var must be > 0");
    const auto m = covariances.front().rows();
    CMatrix<Real> c = CMatrix<Real>::Zero(m, m);
    for (const auto& r : covariances) {
        detail::require(r.rows() == m && r.cols() == m, "single_mmse_estimate: covariances must share M");
        c += r;
    }
    c *= Real(s.length());
    c.diagonal().array() += noise_var;
    return covariances.front() * c.ldlt().solve(despread(y, s, static_cast<int>(m)));
}

/// Estimate with the interfering terms removed: R_1 (noise_var I + tau R_1)^{-1} (s (x) I)^H y_clean.
template <typename Real>
CVector<Real> no_interference_estimate(const CVector<Real>& y_clean, const PilotSequence<Real>& s,
                                       const CMatrix<Real>& r1, Real noise_var) {
    const std::vector<CMatrix<Real>> only{r1};
    return single_mmse_estimate<Real>(y_clean, s, only, noise_var);
}

// --- analytic MSE ------------------------------------------------------------

/// tr{R (I + S^H S R / noise_var)^{-1}} for the joint estimator, any pilots.
template <typename Real>
Real analytic_mse_joint(const EstimationProblem<Real>& problem) {
    problem.validate();
    const int m = problem.num_antennas();
    const auto l_cells = problem.num_cells();
    // S^H S = G (x) I_M with G the L x L pilot Gram matrix
    CMatrix<Real> gram(l_cells, l_cells);
    for (int i = 0; i < l_cells; ++i)
        for (int j = 0; j < l_cells; ++j)
            gram(i, j) = problem.pilots[i].symbols().dot(problem.pilots[j].symbols());
    const CMatrix<Real> r = block_diagonal<Real>(problem.covariances);
    CMatrix<Real> a(r.rows(), r.cols());
    for (int i = 0; i < l_cells; ++i)
        for (int j = 0; j < l_cells; ++j)
            a.block(Eigen::Index(i) * m, Eigen::Index(j) * m, m, m) =
                (gram(i, j) / problem.noise_var) * problem.covariances[j];
    a.diagonal().array() += Real(1);
    // tr(R A^{-1}) = tr(A^{-1} R)
    return real_trace(CMatrix<Real>(a.partialPivLu().solve(r)));
}

/// tr{R_1 - R_1 ((noise_var/tau) I + sum_l R_l)^{-1} R_1}: identical pilots in every cell.
template <typename Real>
Real analytic_mse_single(std::span<const CMatrix<Real>> covariances, Real noise_var, int tau) {
    detail::require(!covariances.empty(), "analytic_mse_single: need the desired covariance");
    detail::require(noise_var > 0 && tau > 0, "analytic_mse_single: noise_var and tau must be > 0");
    const CMatrix<Real>& r1 = covariances.front();
    CMatrix<Real> c = CMatrix<Real>::Zero(r1.rows(), r1.cols());
    for (const auto& r : covariances) c += r;
    c.diagonal().array() += noise_var / Real(tau);
    const CMatrix<Real> x = c.ldlt().solve(r1);
    // tr(R_1 X) without forming the product
    return real_trace(r1) - std::real(r1.transpose().cwiseProduct(x).sum());
}

/// Same quantity as analytic_mse_single, evaluated in the (M tau)-dimensional
/// observation space for an explicit shared pilot instead of through S^H S = tau I.
template <typename Real>
Real analytic_mse_single_with_pilot(const PilotSequence<Real>& s, std::span<const CMatrix<Real>> covariances,
                                    Real noise_var) {
    detail::require(!covariances.empty(), "analytic_mse_single_with_pilot: need the desired covariance");
    detail::require(noise_var > 0, "analytic_mse_single_with_pilot: noise_var must be > 0");
    const CMatrix<Real>& r1 = covariances.front();
    const int m = static_cast<int>(r1.rows());
    CMatrix<Real> sum = CMatrix<Real>::Zero(m, m);
    for (const auto& r : covariances) sum += r;
    const std::vector<PilotSequence<Real>> one{s};
    const CMatrix<Real> sbar = stacked_pilot_matrix<Real>(one, m);
    CMatrix<Real> c = sbar * sum * sbar.adjoint();
    c.diagonal().array() += noise_var;
    const CMatrix<Real> cross = sbar * r1;  // Cov(y, h_1)
    return real_trace(r1) - real_trace(CMatrix<Real>(cross.adjoint() * c.ldlt().solve(cross)));
}

/// tr{R_1 (I + (tau/noise_var) R_1)^{-1}}.
template <typename Real>
Real analytic_mse_no_int(const CMatrix<Real>& r1, Real noise_var, int tau) {
    detail::require(noise_var > 0 && tau > 0, "analytic_mse_no_int: noise_var and tau must be > 0");
    CMatrix<Real> a = (Real(tau) / noise_var) * r1;
    a.diagonal().array() += Real(1);
    return real_trace(CMatrix<Real>(a.partialPivLu().solve(r1)));
}

}  // namespace pilotcov
