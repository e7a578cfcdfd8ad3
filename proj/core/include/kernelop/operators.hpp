#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kernelop/kernel.hpp"

namespace kernelop {

/// Which part of the closed domain a sample point belongs to. The
/// differential operator acts on Interior points and collapses to the
/// identity on Boundary and Initial points.
enum class RegionTag : std::uint8_t { Interior = 0, Boundary = 1, Initial = 2 };

inline const char* to_string(RegionTag t) {
    switch (t) {
        case RegionTag::Interior: return "interior";
        case RegionTag::Boundary: return "boundary";
        case RegionTag::Initial: return "initial";
    }
    return "?";
}

/// A function with caller-supplied exact partial derivatives. Used for
/// manufactured test solutions and for basis windows.
struct DifferentiableFunction {
    std::function<double(PointView)> value;
    std::function<double(const MultiIndex&, PointView)> partial;

    double operator()(PointView x) const { return value(x); }
};

/// One term phi_alpha * d^alpha of a linear differential operator.
struct OperatorTerm {
    std::function<double(PointView)> coefficient;
    MultiIndex index;
};

/// Region-tagged linear differential operator: the sum of interior_terms on
/// Interior points, the identity on Boundary and Initial points.
class PdeOperatorSpec {
public:
    PdeOperatorSpec(int dimension, std::vector<OperatorTerm> interior_terms);

    /// The order-zero operator with unit coefficient (plain kernel ridge).
    static PdeOperatorSpec identity(int dimension);

    int dimension() const { return dimension_; }
    /// s = max |alpha| over interior terms.
    int order() const { return order_; }
    const std::vector<OperatorTerm>& interior_terms() const { return terms_; }
    const MultiIndex& zero_index() const { return zero_; }

    /// Evaluates every interior coefficient at x into `out` (size = #terms).
    void coefficients_at(PointView x, std::span<double> out) const;

private:
    int dimension_;
    int order_;
    std::vector<OperatorTerm> terms_;
    MultiIndex zero_;
};

/// (P_s u)(x): the operator's term sum on Interior points, u(x) otherwise.
double apply_to_function(const PdeOperatorSpec& op, const DifferentiableFunction& u, PointView x,
                         RegionTag region);

/// P_s applied to the first kernel argument at x, the second argument held
/// at y: sum_a phi_a(x) D^(a,0) K(x,y) on Interior x, K(x,y) otherwise.
double apply_first(const PdeOperatorSpec& op, const KernelSpec& kernel, PointView x,
                   RegionTag region_x, PointView y);

/// P_s applied to both kernel arguments, each collapsing to the identity on
/// Boundary/Initial points: the entries of the generalized Gram matrix.
double apply_both(const PdeOperatorSpec& op, const KernelSpec& kernel, PointView x_i,
                  RegionTag region_i, PointView x_j, RegionTag region_j);

/// d^alpha_x [ window(x) * K(z, x) ] by the general Leibniz rule,
///   sum_{gamma <= alpha} binom(alpha,gamma) d^gamma window(x) d^{alpha-gamma}_x K(z,x);
/// the kernel derivative in the second argument is taken via symmetry.
double leibniz_windowed_partial(const DifferentiableFunction& window, const KernelSpec& kernel,
                                const MultiIndex& alpha, PointView x, PointView z);

// --- precomputed-coefficient fast paths -----------------------------------
//
// Gram assembly evaluates every coefficient at every sample once, then reuses
// the values across all O(N^2) pairs; these overloads take those values and a
// shared per-pair derivative evaluator.

double apply_both_pre(const PdeOperatorSpec& op, const PairDerivEvaluator& pd, RegionTag region_i,
                      RegionTag region_j, std::span<const double> coeff_i,
                      std::span<const double> coeff_j);

double apply_first_pre(const PdeOperatorSpec& op, const PairDerivEvaluator& pd, RegionTag region_x,
                       std::span<const double> coeff_x);

}  // namespace kernelop
