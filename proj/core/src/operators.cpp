#include "kernelop/operators.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace kernelop {

PdeOperatorSpec::PdeOperatorSpec(int dimension, std::vector<OperatorTerm> interior_terms)
    : dimension_(dimension), order_(0), terms_(std::move(interior_terms)), zero_(dimension) {
    if (dimension < 1 || dimension > MultiIndex::kMaxDim)
        throw ConfigError("PdeOperatorSpec: dimension must be in [1, " +
                          std::to_string(MultiIndex::kMaxDim) + "]");
    for (const auto& t : terms_) {
        if (t.index.dim() != dimension_)
            throw ShapeError("PdeOperatorSpec: term index dimension mismatch");
        if (!t.coefficient) throw ConfigError("PdeOperatorSpec: term has no coefficient");
        order_ = std::max(order_, t.index.order());
    }
}

PdeOperatorSpec PdeOperatorSpec::identity(int dimension) {
    std::vector<OperatorTerm> terms;
    terms.push_back({[](PointView) { return 1.0; }, MultiIndex::zero(dimension)});
    return PdeOperatorSpec(dimension, std::move(terms));
}

void PdeOperatorSpec::coefficients_at(PointView x, std::span<double> out) const {
    if (out.size() != terms_.size())
        throw ShapeError("coefficients_at: output span size mismatch");
    for (std::size_t t = 0; t < terms_.size(); ++t) out[t] = terms_[t].coefficient(x);
}

double apply_to_function(const PdeOperatorSpec& op, const DifferentiableFunction& u, PointView x,
                         RegionTag region) {
    if (static_cast<int>(x.size()) != op.dimension())
        throw ShapeError("apply_to_function: point dimension mismatch");
    if (region != RegionTag::Interior) return u.value(x);
    double sum = 0.0;
    for (const auto& t : op.interior_terms()) sum += t.coefficient(x) * u.partial(t.index, x);
    return sum;
}

double apply_first_pre(const PdeOperatorSpec& op, const PairDerivEvaluator& pd, RegionTag region_x,
                       std::span<const double> coeff_x) {
    if (region_x != RegionTag::Interior) return pd.value();
    const auto& terms = op.interior_terms();
    double sum = 0.0;
    for (std::size_t a = 0; a < terms.size(); ++a)
        sum += coeff_x[a] * pd.deriv(terms[a].index, op.zero_index());
    return sum;
}

double apply_both_pre(const PdeOperatorSpec& op, const PairDerivEvaluator& pd, RegionTag region_i,
                      RegionTag region_j, std::span<const double> coeff_i,
                      std::span<const double> coeff_j) {
    const bool int_i = region_i == RegionTag::Interior;
    const bool int_j = region_j == RegionTag::Interior;
    if (!int_i && !int_j) return pd.value();
    const auto& terms = op.interior_terms();
    if (int_i && !int_j) {
        double sum = 0.0;
        for (std::size_t a = 0; a < terms.size(); ++a)
            sum += coeff_i[a] * pd.deriv(terms[a].index, op.zero_index());
        return sum;
    }
    if (!int_i && int_j) {
        double sum = 0.0;
        for (std::size_t b = 0; b < terms.size(); ++b)
            sum += coeff_j[b] * pd.deriv(op.zero_index(), terms[b].index);
        return sum;
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < terms.size(); ++a) {
        double inner = 0.0;
        for (std::size_t b = 0; b < terms.size(); ++b)
            inner += coeff_j[b] * pd.deriv(terms[a].index, terms[b].index);
        sum += coeff_i[a] * inner;
    }
    return sum;
}

namespace {

constexpr std::size_t kMaxTerms = 32;

void eval_coeffs(const PdeOperatorSpec& op, PointView x, std::array<double, kMaxTerms>& buf) {
    const auto& terms = op.interior_terms();
    if (terms.size() > kMaxTerms) throw CapabilityError("operator has too many terms");
    for (std::size_t t = 0; t < terms.size(); ++t) buf[t] = terms[t].coefficient(x);
}

}  // namespace

double apply_first(const PdeOperatorSpec& op, const KernelSpec& kernel, PointView x,
                   RegionTag region_x, PointView y) {
    if (op.dimension() != kernel.dimension)
        throw ShapeError("apply_first: operator/kernel dimension mismatch");
    PairDerivEvaluator pd(kernel, x, y);
    if (region_x != RegionTag::Interior) return pd.value();
    std::array<double, kMaxTerms> coeffs{};
    eval_coeffs(op, x, coeffs);
    return apply_first_pre(op, pd, region_x,
                           std::span<const double>(coeffs.data(), op.interior_terms().size()));
}

double apply_both(const PdeOperatorSpec& op, const KernelSpec& kernel, PointView x_i,
                  RegionTag region_i, PointView x_j, RegionTag region_j) {
    if (op.dimension() != kernel.dimension)
        throw ShapeError("apply_both: operator/kernel dimension mismatch");
    PairDerivEvaluator pd(kernel, x_i, x_j);
    std::array<double, kMaxTerms> ci{}, cj{};
    const std::size_t n_terms = op.interior_terms().size();
    if (region_i == RegionTag::Interior) eval_coeffs(op, x_i, ci);
    if (region_j == RegionTag::Interior) eval_coeffs(op, x_j, cj);
    return apply_both_pre(op, pd, region_i, region_j,
                          std::span<const double>(ci.data(), n_terms),
                          std::span<const double>(cj.data(), n_terms));
}

double leibniz_windowed_partial(const DifferentiableFunction& window, const KernelSpec& kernel,
                                const MultiIndex& alpha, PointView x, PointView z) {
    if (alpha.dim() != kernel.dimension)
        throw ShapeError("leibniz_windowed_partial: index dimension mismatch");
    // x is the second kernel argument; by symmetry differentiate the first
    // argument of K(x, z) instead.
    PairDerivEvaluator pd(kernel, x, z);
    const int d = alpha.dim();
    MultiIndex gamma = MultiIndex::zero(d);
    MultiIndex rest = alpha;
    double sum = 0.0;
    // Odometer over all gamma <= alpha componentwise.
    while (true) {
        sum += multi_binomial(alpha, gamma) * window.partial(gamma, x) *
               pd.deriv(rest, MultiIndex::zero(d));
        int axis = 0;
        for (; axis < d; ++axis) {
            if (gamma[axis] < alpha[axis]) {
                gamma.set(axis, gamma[axis] + 1);
                rest.set(axis, rest[axis] - 1);
                break;
            }
            gamma.set(axis, 0);
            rest.set(axis, alpha[axis]);
        }
        if (axis == d) break;
    }
    return sum;
}

}  // namespace kernelop
