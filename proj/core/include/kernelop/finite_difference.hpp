#pragma once

// Independent finite-difference reference for Gaussian kernel derivatives.
// Used by the self-check commands and the test suites. It differences its own
// quad-precision Gaussian (not the library's evaluator) with nested two-point
// central stencils plus one Richardson level, so its values share no code
// path with the Hermite-recursion implementation it is checked against.

#include <quadmath.h>

#include <array>
#include <cmath>
#include <span>

#include "kernelop/multi_index.hpp"

namespace kernelop::fd {

using float128 = __float128;
constexpr int kMaxDim = MultiIndex::kMaxDim;
using QuadPoint = std::array<float128, kMaxDim>;

inline float128 gaussian(const QuadPoint& x, const QuadPoint& y, int dim, float128 eta) {
    float128 sq = 0;
    for (int i = 0; i < dim; ++i) {
        const float128 t = (x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]) / eta;
        sq += t * t;
    }
    return expq(-sq);
}

inline float128 nested_central(MultiIndex alpha, MultiIndex beta, QuadPoint x, QuadPoint y, int dim,
                               float128 eta, float128 h) {
    for (int i = 0; i < dim; ++i) {
        if (alpha[i] > 0) {
            alpha.set(i, alpha[i] - 1);
            QuadPoint xp = x, xm = x;
            xp[static_cast<std::size_t>(i)] += h;
            xm[static_cast<std::size_t>(i)] -= h;
            return (nested_central(alpha, beta, xp, y, dim, eta, h) -
                    nested_central(alpha, beta, xm, y, dim, eta, h)) /
                   (2 * h);
        }
    }
    for (int i = 0; i < dim; ++i) {
        if (beta[i] > 0) {
            beta.set(i, beta[i] - 1);
            QuadPoint yp = y, ym = y;
            yp[static_cast<std::size_t>(i)] += h;
            ym[static_cast<std::size_t>(i)] -= h;
            return (nested_central(alpha, beta, x, yp, dim, eta, h) -
                    nested_central(alpha, beta, x, ym, dim, eta, h)) /
                   (2 * h);
        }
    }
    return gaussian(x, y, dim, eta);
}

/// d^alpha_x d^beta_y exp(-|x-y|^2/eta^2) by Richardson-extrapolated nested
/// central differences; the step follows the derivative order.
inline double mixed_deriv(const MultiIndex& alpha, const MultiIndex& beta,
                          std::span<const double> x, std::span<const double> y, double eta) {
    const int dim = alpha.dim();
    QuadPoint xq{}, yq{};
    for (int i = 0; i < dim; ++i) {
        xq[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
        yq[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)];
    }
    const int order = alpha.order() + beta.order();
    const float128 h =
        static_cast<float128>(order <= 2 ? 1e-3 : 5e-4) * static_cast<float128>(eta);
    const float128 coarse = nested_central(alpha, beta, xq, yq, dim, eta, h);
    const float128 fine = nested_central(alpha, beta, xq, yq, dim, eta, h / 2);
    return static_cast<double>((4 * fine - coarse) / 3);
}

/// Pass/fail at the kernel-derivative oracle tolerance: relative 1e-5 against
/// the reference, absolute 1e-10 where the reference magnitude is below 1e-10.
inline bool matches_reference(double analytic, double reference) {
    const double err = std::abs(analytic - reference);
    if (std::abs(reference) < 1e-10) return err <= 1e-10;
    return err <= 1e-5 * std::abs(reference);
}

}  // namespace kernelop::fd
