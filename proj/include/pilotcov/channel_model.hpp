// SPDX-License-Identifier: Apache-2.0
//
// Uniform linear array response, angle-of-arrival densities and the
// finite-multipath channel draw.
#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <utility>
#include <variant>

#include "pilotcov/core.hpp"

namespace pilotcov {

/// ULA with `num_antennas` elements spaced `spacing_ratio` wavelengths apart.
template <typename Real = double>
struct ArrayGeometry {
    int num_antennas = 1;
    Real spacing_ratio = Real(0.5);

    ArrayGeometry() = default;
    ArrayGeometry(int m, Real d_over_lambda) : num_antennas(m), spacing_ratio(d_over_lambda) {
        if (m < 1) throw DomainError("ArrayGeometry: num_antennas must be >= 1");
        if (!(d_over_lambda > 0) || d_over_lambda > Real(0.5))
            throw DomainError("ArrayGeometry: spacing_ratio must lie in (0, 0.5]");
    }
};

/// Maps any angle onto [0, pi] preserving its cosine.
template <typename Real>
Real fold_angle(Real phi) {
    Real t = std::fmod(phi, 2 * kPi<Real>);
    if (t < 0) t += 2 * kPi<Real>;
    if (t > kPi<Real>) t = 2 * kPi<Real> - t;
    return t;
}

template <typename Real>
CVector<Real> steering_vector(const ArrayGeometry<Real>& geom, Real theta) {
    const Real step = -2 * kPi<Real> * geom.spacing_ratio * std::cos(theta);
    CVector<Real> a(geom.num_antennas);
    for (int m = 0; m < geom.num_antennas; ++m) a(m) = std::polar(Real(1), step * Real(m));
    return a;
}

// --- AOA densities -----------------------------------------------------------

template <typename Real = double>
struct PointAoa {
    Real angle{};
};

template <typename Real = double>
struct UniformAoa {
    Real mean{};
    Real half_width{};
};

template <typename Real = double>
struct GaussianAoa {
    Real mean{};
    Real stddev{};
};

template <typename Real = double>
struct AngularSupport {
    Real theta_min{};
    Real theta_max{};
};

template <typename Real = double>
class AoaDensity {
public:
    using Variant = std::variant<PointAoa<Real>, UniformAoa<Real>, GaussianAoa<Real>>;

    static AoaDensity point(Real angle) { return AoaDensity(PointAoa<Real>{angle}); }

    static AoaDensity uniform(Real mean, Real half_width) {
        if (!(half_width > 0)) throw DomainError("AoaDensity: uniform half_width must be > 0");
        return AoaDensity(UniformAoa<Real>{mean, half_width});
    }

    static AoaDensity gaussian(Real mean, Real stddev) {
        if (!(stddev > 0)) throw DomainError("AoaDensity: gaussian stddev must be > 0");
        return AoaDensity(GaussianAoa<Real>{mean, stddev});
    }

    const Variant& variant() const { return v_; }
    bool is_point() const { return std::holds_alternative<PointAoa<Real>>(v_); }
    bool is_uniform() const { return std::holds_alternative<UniformAoa<Real>>(v_); }
    bool is_gaussian() const { return std::holds_alternative<GaussianAoa<Real>>(v_); }

    Real mean() const {
        return std::visit([](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointAoa<Real>>) return d.angle;
            else return d.mean;
        }, v_);
    }

    /// Mirror image theta -> -theta. Leaves every covariance unchanged.
    AoaDensity mirrored() const {
        return std::visit([](auto d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointAoa<Real>>) d.angle = -d.angle;
            else d.mean = -d.mean;
            return AoaDensity(d);
        }, v_);
    }

    /// Support in cosine-equivalent form within [0, pi]; empty for the Gaussian
    /// (unbounded) case. A uniform support that straddles 0 or pi folds onto a
    /// single interval whose far edge is the farther of the two folded endpoints.
    std::optional<AngularSupport<Real>> folded_support() const {
        if (const auto* p = std::get_if<PointAoa<Real>>(&v_)) {
            const Real a = fold_angle(p->angle);
            return AngularSupport<Real>{a, a};
        }
        if (const auto* u = std::get_if<UniformAoa<Real>>(&v_)) {
            const Real lo = u->mean - u->half_width;
            const Real hi = u->mean + u->half_width;
            if (u->half_width >= kPi<Real>) return AngularSupport<Real>{0, kPi<Real>};
            // cos is monotone between consecutive multiples of pi
            const Real k_lo = std::floor(lo / kPi<Real>);
            const Real k_hi = std::floor(hi / kPi<Real>);
            const Real flo = fold_angle(lo);
            const Real fhi = fold_angle(hi);
            if (k_lo == k_hi) return AngularSupport<Real>{std::min(flo, fhi), std::max(flo, fhi)};
            if (k_hi - k_lo >= 2) return AngularSupport<Real>{0, kPi<Real>};
            // crosses a multiple of pi: the fold point is an edge of the folded set
            const bool crosses_zero = std::fmod(std::abs(k_hi), Real(2)) == 0;
            if (crosses_zero) return AngularSupport<Real>{0, std::max(flo, fhi)};
            return AngularSupport<Real>{std::min(flo, fhi), kPi<Real>};
        }
        return std::nullopt;
    }

    /// Draws one angle. Gaussian samples are returned unfolded.
    template <typename Rng>
    Real sample(Rng& rng) const {
        return std::visit([&rng](const auto& d) -> Real {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointAoa<Real>>) {
                return d.angle;
            } else if constexpr (std::is_same_v<T, UniformAoa<Real>>) {
                std::uniform_real_distribution<Real> dist(d.mean - d.half_width, d.mean + d.half_width);
                return dist(rng);
            } else {
                std::normal_distribution<Real> dist(d.mean, d.stddev);
                return dist(rng);
            }
        }, v_);
    }

private:
    template <typename V>
    explicit AoaDensity(V v) : v_(std::move(v)) {}

    Variant v_;
};

template <typename Real = double>
struct PathProfile {
    int num_paths = 1;
    Real avg_attenuation_sq = 1;
    AoaDensity<Real> aoa = AoaDensity<Real>::point(kPi<Real> / 2);

    PathProfile(int paths, Real delta_sq, AoaDensity<Real> density)
        : num_paths(paths), avg_attenuation_sq(delta_sq), aoa(std::move(density)) {
        if (paths < 1) throw DomainError("PathProfile: num_paths must be >= 1");
        if (!(delta_sq >= 0)) throw DomainError("PathProfile: avg_attenuation_sq must be >= 0");
    }
};

/// Circularly-symmetric complex Gaussian sample with E|z|^2 = variance.
template <typename Real, typename Rng>
Complex<Real> complex_gaussian(Rng& rng, Real variance) {
    std::normal_distribution<Real> n01(0, 1);
    const Real s = std::sqrt(variance / 2);
    const Real re = n01(rng);
    const Real im = n01(rng);
    return {s * re, s * im};
}

/// h = (1/sqrt(P)) * sum_p a(theta_p) * alpha_p, alpha_p ~ CN(0, delta^2).
template <typename Real, typename Rng>
CVector<Real> draw_channel(const PathProfile<Real>& profile, const ArrayGeometry<Real>& geom, Rng& rng) {
    CVector<Real> h = CVector<Real>::Zero(geom.num_antennas);
    if (profile.avg_attenuation_sq == 0) return h;
    for (int p = 0; p < profile.num_paths; ++p) {
        const Real theta = profile.aoa.sample(rng);
        const Complex<Real> gain = complex_gaussian(rng, profile.avg_attenuation_sq);
        h += steering_vector(geom, theta) * gain;
    }
    return h / std::sqrt(Real(profile.num_paths));
}

/// Distance-based large-scale gain alpha / d^gamma.
template <typename Real>
Real path_loss(Real alpha, Real distance, Real gamma) {
    if (!(distance > 0)) throw DomainError("path_loss: distance must be > 0");
    return alpha / std::pow(distance, gamma);
}

}  // namespace pilotcov
