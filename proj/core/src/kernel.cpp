#include "kernelop/kernel.hpp"

#include <string>

namespace kernelop {

KernelSpec::KernelSpec(double bandwidth_, int dimension_, int max_order_)
    : bandwidth(bandwidth_), dimension(dimension_), max_order(max_order_) {
    if (!(bandwidth > 0.0))
        throw ConfigError("KernelSpec: bandwidth must be positive, got " +
                          std::to_string(bandwidth_));
    if (dimension < 1 || dimension > MultiIndex::kMaxDim)
        throw ConfigError("KernelSpec: dimension must be in [1, " +
                          std::to_string(MultiIndex::kMaxDim) + "], got " +
                          std::to_string(dimension_));
    if (max_order < 0 || max_order > 8)
        throw ConfigError("KernelSpec: max derivative order must be in [0, 8], got " +
                          std::to_string(max_order_));
}

}  // namespace kernelop
