#pragma once

#include <array>
#include <cmath>
#include <span>

#include "kernelop/errors.hpp"
#include "kernelop/multi_index.hpp"

namespace kernelop {

using PointView = std::span<const double>;

/// Gaussian kernel K(x,y) = exp(-|x-y|^2 / eta^2) with an exact
/// mixed-derivative table of bounded order in each argument.
///
/// Immutable after construction; all operations on it are pure and safe to
/// share across threads.
struct KernelSpec {
    double bandwidth;   ///< eta > 0, in length units of the domain
    int dimension;      ///< d >= 1
    int max_order;      ///< per-argument derivative order cap

    /// Beyond this separation (|x-y|/eta) the kernel and every derivative
    /// underflow double precision; they are returned as exactly 0.0.
    static constexpr double kUnderflowRadius = 40.0;

    explicit KernelSpec(double bandwidth_, int dimension_, int max_order_ = 3);
};

/// Physicists' Hermite polynomial H_n(t) by the three-term recursion
/// H_0 = 1, H_1 = 2t, H_{n+1} = 2t H_n - 2n H_{n-1}.
inline double hermite(int n, double t) {
    if (n < 0) throw ConfigError("hermite: order must be non-negative");
    if (n == 0) return 1.0;
    double hm = 1.0;       // H_0
    double h = 2.0 * t;    // H_1
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * t * h - 2.0 * static_cast<double>(k) * hm;
        hm = h;
        h = next;
    }
    return h;
}

namespace detail {

inline void check_point_dims(const KernelSpec& spec, PointView x, PointView y) {
    if (static_cast<int>(x.size()) != spec.dimension ||
        static_cast<int>(y.size()) != spec.dimension)
        throw ShapeError("kernel: point dimension does not match KernelSpec");
}

inline void check_index_dims(const KernelSpec& spec, const MultiIndex& alpha,
                             const MultiIndex& beta) {
    if (alpha.dim() != spec.dimension || beta.dim() != spec.dimension)
        throw ShapeError("kernel: multi-index dimension does not match KernelSpec");
    if (alpha.order() > spec.max_order || beta.order() > spec.max_order)
        throw CapabilityError("kernel: derivative order exceeds the configured maximum (" +
                              std::to_string(spec.max_order) + " per argument)");
}

}  // namespace detail

/// K(x, y); value in (0, 1], symmetric, exactly 0.0 past the underflow radius.
inline double eval(const KernelSpec& spec, PointView x, PointView y) {
    detail::check_point_dims(spec, x, y);
    const double inv_eta = 1.0 / spec.bandwidth;
    double sq = 0.0;
    for (int i = 0; i < spec.dimension; ++i) {
        const double t = (x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]) * inv_eta;
        sq += t * t;
    }
    if (sq > KernelSpec::kUnderflowRadius * KernelSpec::kUnderflowRadius) return 0.0;
    return std::exp(-sq);
}

/// Shared state for all derivative orders at one (x, y) pair: the
/// exponential factor and the per-coordinate Hermite values are computed
/// once, so an operator with many terms pays one exp per pair.
///
/// The kernel depends on r = x - y only; per coordinate
///   d^n/dr^n exp(-(r/eta)^2) = eta^{-n} (-1)^n H_n(r/eta) exp(-(r/eta)^2),
/// and a derivative in y flips the sign of r, so
///   D^(alpha,beta) K = (-1)^{|alpha|} eta^{-|alpha|-|beta|}
///                      prod_i H_{alpha_i+beta_i}(r_i/eta) * K(x,y).
class PairDerivEvaluator {
public:
    PairDerivEvaluator(const KernelSpec& spec, PointView x, PointView y) : spec_(&spec) {
        detail::check_point_dims(spec, x, y);
        const double inv_eta = 1.0 / spec.bandwidth;
        const int d = spec.dimension;
        const int n_orders = 2 * spec.max_order + 1;
        double sq = 0.0;
        for (int i = 0; i < d; ++i) {
            const double t =
                (x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]) * inv_eta;
            sq += t * t;
            // Hermite recursion along this coordinate.
            double* h = hermite_.data() + i * n_orders;
            h[0] = 1.0;
            if (n_orders > 1) h[1] = 2.0 * t;
            for (int n = 1; n + 1 < n_orders; ++n)
                h[n + 1] = 2.0 * t * h[n] - 2.0 * static_cast<double>(n) * h[n - 1];
        }
        base_ = (sq > KernelSpec::kUnderflowRadius * KernelSpec::kUnderflowRadius)
                    ? 0.0
                    : std::exp(-sq);
        inv_eta_pow_[0] = 1.0;
        for (int n = 1; n < n_orders; ++n) inv_eta_pow_[static_cast<std::size_t>(n)] =
            inv_eta_pow_[static_cast<std::size_t>(n - 1)] * inv_eta;
    }

    /// Plain kernel value K(x, y).
    double value() const { return base_; }

    /// d^alpha_x d^beta_y K(x, y).
    double deriv(const MultiIndex& alpha, const MultiIndex& beta) const {
        detail::check_index_dims(*spec_, alpha, beta);
        if (base_ == 0.0) return 0.0;
        const int n_orders = 2 * spec_->max_order + 1;
        double prod = base_;
        int total = 0;
        for (int i = 0; i < spec_->dimension; ++i) {
            const int n = alpha[i] + beta[i];
            total += n;
            prod *= hermite_[static_cast<std::size_t>(i * n_orders + n)];
        }
        const double sign = (alpha.order() % 2 == 0) ? 1.0 : -1.0;
        return sign * inv_eta_pow_[static_cast<std::size_t>(total)] * prod;
    }

private:
    static constexpr std::size_t kTableSize =
        static_cast<std::size_t>(MultiIndex::kMaxDim) * 17u;  // d * (2*max_order + 1), caps below

    const KernelSpec* spec_;
    double base_ = 0.0;
    std::array<double, kTableSize> hermite_{};
    std::array<double, 17> inv_eta_pow_{};
};

/// d^alpha_x d^beta_y K(x, y). One-shot convenience over PairDerivEvaluator.
inline double deriv(const KernelSpec& spec, const MultiIndex& alpha, const MultiIndex& beta,
                    PointView x, PointView y) {
    detail::check_index_dims(spec, alpha, beta);
    return PairDerivEvaluator(spec, x, y).deriv(alpha, beta);
}

}  // namespace kernelop
