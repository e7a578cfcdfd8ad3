#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>

#include "kernelop/errors.hpp"

namespace kernelop {

/// Exponent tuple of a partial derivative, one non-negative entry per
/// coordinate. Kept inline (no heap) so operator application stays
/// allocation-free per Gram entry.
class MultiIndex {
public:
    static constexpr int kMaxDim = 8;

    MultiIndex() = default;

    explicit MultiIndex(int dim) : dim_(dim) {
        if (dim < 1 || dim > kMaxDim)
            throw ConfigError("MultiIndex: dimension must be in [1, " +
                              std::to_string(kMaxDim) + "], got " + std::to_string(dim));
        exp_.fill(0);
    }

    MultiIndex(std::initializer_list<int> exps) : dim_(static_cast<int>(exps.size())) {
        if (dim_ < 1 || dim_ > kMaxDim)
            throw ConfigError("MultiIndex: dimension must be in [1, " +
                              std::to_string(kMaxDim) + "]");
        exp_.fill(0);
        int i = 0;
        for (int e : exps) {
            if (e < 0) throw ConfigError("MultiIndex: exponents must be non-negative");
            exp_[static_cast<std::size_t>(i++)] = static_cast<std::uint8_t>(e);
        }
    }

    static MultiIndex zero(int dim) { return MultiIndex(dim); }

    /// Unit index: first derivative along `axis`.
    static MultiIndex unit(int dim, int axis, int power = 1) {
        MultiIndex m(dim);
        if (axis < 0 || axis >= dim) throw ConfigError("MultiIndex::unit: axis out of range");
        if (power < 0) throw ConfigError("MultiIndex::unit: power must be non-negative");
        m.exp_[static_cast<std::size_t>(axis)] = static_cast<std::uint8_t>(power);
        return m;
    }

    int dim() const { return dim_; }

    int operator[](int i) const { return exp_[static_cast<std::size_t>(i)]; }

    void set(int i, int v) {
        if (v < 0) throw ConfigError("MultiIndex::set: exponent must be non-negative");
        exp_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
    }

    /// |alpha| = sum of exponents; O(d).
    int order() const {
        int s = 0;
        for (int i = 0; i < dim_; ++i) s += exp_[static_cast<std::size_t>(i)];
        return s;
    }

    /// Componentwise gamma <= alpha, the partial order of the Leibniz rule.
    bool dominates(const MultiIndex& gamma) const {
        for (int i = 0; i < dim_; ++i)
            if (gamma[i] > (*this)[i]) return false;
        return true;
    }

    bool operator==(const MultiIndex& o) const {
        if (dim_ != o.dim_) return false;
        for (int i = 0; i < dim_; ++i)
            if ((*this)[i] != o[i]) return false;
        return true;
    }

    std::string to_string() const {
        std::string s = "(";
        for (int i = 0; i < dim_; ++i) {
            if (i) s += ",";
            s += std::to_string((*this)[i]);
        }
        return s + ")";
    }

private:
    int dim_ = 0;
    std::array<std::uint8_t, kMaxDim> exp_{};
};

/// binom(n, k) for the small arguments of Leibniz expansions.
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

/// Product of per-coordinate binomials binom(alpha_i, gamma_i).
inline double multi_binomial(const MultiIndex& alpha, const MultiIndex& gamma) {
    double r = 1.0;
    for (int i = 0; i < alpha.dim(); ++i) r *= binomial(alpha[i], gamma[i]);
    return r;
}

}  // namespace kernelop
