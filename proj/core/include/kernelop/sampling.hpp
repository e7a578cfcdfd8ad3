#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kernelop/operators.hpp"

namespace kernelop {

/// Points are stored row-major so a sample row is a contiguous PointView.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// xoshiro256++ with splitmix64 seeding. Pinned here (rather than relying on
/// std::mt19937 + distributions, whose stream is implementation-defined for
/// doubles) so sampled point sets are bit-identical across platforms.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t x = seed;
        auto splitmix = [&x]() {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        };
        for (auto& si : s_) si = splitmix();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in the open interval (0, 1).
    double uniform_open01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Modulo bias is negligible for the n used here (n << 2^64), and a
        // biasless rejection loop would make the stream length input-dependent.
        return next() % n;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        const double u1 = uniform_open01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Mixes a stream label into a master seed (splitmix64 round), used to derive
/// independent seeds for interior/boundary/initial draws and per-trial runs.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t label);

/// Axis-aligned box, optionally with one axis designated as time (space-time
/// problems sample its lower face separately as the initial slice).
struct BoxDomain {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::optional<int> time_axis;

    BoxDomain(Eigen::VectorXd lower_, Eigen::VectorXd upper_,
              std::optional<int> time_axis_ = std::nullopt);

    static BoxDomain unit_cube(int dim);

    int dim() const { return static_cast<int>(lower.size()); }
};

/// Collocation points with region tags and, optionally, observed values.
struct LabeledSampleSet {
    PointMatrix points;                    // N x d
    std::vector<RegionTag> regions;        // N
    std::optional<Eigen::VectorXd> values; // Y_N, absent until data attached
    std::uint64_t seed = 0;

    long size() const { return points.rows(); }
    int dim() const { return static_cast<int>(points.cols()); }

    PointView point(long i) const {
        return PointView(points.data() + i * points.cols(), static_cast<std::size_t>(points.cols()));
    }
    RegionTag region(long i) const { return regions[static_cast<std::size_t>(i)]; }

    long count(RegionTag tag) const;
};

/// n i.i.d. points strictly inside the box, tagged Interior.
LabeledSampleSet sample_interior(const BoxDomain& domain, long n, std::uint64_t seed);

/// n points on the non-time faces, allocated to faces proportionally to face
/// measure (largest remainder), uniform within each face; the pinned
/// coordinate is bit-exactly the bound. Tagged Boundary.
LabeledSampleSet sample_boundary(const BoxDomain& domain, long n, std::uint64_t seed);

/// n uniform points on the t = t_min slice of a space-time box, tagged Initial.
LabeledSampleSet sample_initial(const BoxDomain& domain, long n, std::uint64_t seed);

/// Concatenation preserving tags and order. Values are kept only when every
/// non-empty input carries them.
LabeledSampleSet merge(std::span<const LabeledSampleSet> sets);
LabeledSampleSet merge(std::initializer_list<LabeledSampleSet> sets);

/// The canonical interior-boundary-initial draw used by every benchmark:
/// three independent streams derived from one master seed, merged in order.
LabeledSampleSet sample_problem(const BoxDomain& domain, long n_interior, long n_boundary,
                                long n_initial, std::uint64_t seed);

/// CSV with header x_1,...,x_d,region,value; the value field is empty when
/// the set carries no values. '.' decimal separator, LF line endings.
void write_csv(const LabeledSampleSet& set, const std::string& path);
LabeledSampleSet read_csv(const std::string& path);

}  // namespace kernelop
