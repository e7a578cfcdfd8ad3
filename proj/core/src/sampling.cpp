#include "kernelop/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace kernelop {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t label) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (label + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

BoxDomain::BoxDomain(Eigen::VectorXd lower_, Eigen::VectorXd upper_,
                     std::optional<int> time_axis_)
    : lower(std::move(lower_)), upper(std::move(upper_)), time_axis(time_axis_) {
    if (lower.size() != upper.size() || lower.size() == 0)
        throw ConfigError("BoxDomain: lower/upper must have equal positive dimension");
    for (int i = 0; i < dim(); ++i)
        if (!(lower[i] < upper[i]))
            throw ConfigError("BoxDomain: lower[i] < upper[i] required componentwise");
    if (time_axis && (*time_axis < 0 || *time_axis >= dim()))
        throw ConfigError("BoxDomain: time axis out of range");
}

BoxDomain BoxDomain::unit_cube(int dim) {
    return BoxDomain(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
}

long LabeledSampleSet::count(RegionTag tag) const {
    return std::count(regions.begin(), regions.end(), tag);
}

namespace {

// Strictly interior coordinate; guards against rounding onto a bound.
double open_coord(Xoshiro256pp& rng, double lo, double up) {
    double c = lo + rng.uniform_open01() * (up - lo);
    if (c <= lo) c = std::nextafter(lo, up);
    if (c >= up) c = std::nextafter(up, lo);
    return c;
}

LabeledSampleSet empty_set(int dim, std::uint64_t seed) {
    LabeledSampleSet out;
    out.points.resize(0, dim);
    out.seed = seed;
    return out;
}

}  // namespace

LabeledSampleSet sample_interior(const BoxDomain& domain, long n, std::uint64_t seed) {
    if (n < 0) throw ConfigError("sample_interior: n must be non-negative");
    LabeledSampleSet out = empty_set(domain.dim(), seed);
    out.points.resize(n, domain.dim());
    out.regions.assign(static_cast<std::size_t>(n), RegionTag::Interior);
    Xoshiro256pp rng(seed);
    for (long i = 0; i < n; ++i)
        for (int j = 0; j < domain.dim(); ++j)
            out.points(i, j) = open_coord(rng, domain.lower[j], domain.upper[j]);
    return out;
}

LabeledSampleSet sample_boundary(const BoxDomain& domain, long n, std::uint64_t seed) {
    if (n < 0) throw ConfigError("sample_boundary: n must be non-negative");
    const int d = domain.dim();
    LabeledSampleSet out = empty_set(d, seed);

    // Faces of every non-time axis, in (axis, low/high) order. For space-time
    // domains the time faces are excluded: the lower one is the initial slice
    // and no data lives on the upper one.
    struct Face {
        int axis;
        bool high;
        double measure;
    };
    std::vector<Face> faces;
    for (int a = 0; a < d; ++a) {
        if (domain.time_axis && *domain.time_axis == a) continue;
        double m = 1.0;
        for (int b = 0; b < d; ++b)
            if (b != a) m *= domain.upper[b] - domain.lower[b];
        faces.push_back({a, false, m});
        faces.push_back({a, true, m});
    }
    if (faces.empty()) throw ConfigError("sample_boundary: domain has no non-time faces");

    // Largest-remainder allocation of n points proportional to face measure.
    const double total = std::accumulate(faces.begin(), faces.end(), 0.0,
                                         [](double acc, const Face& f) { return acc + f.measure; });
    std::vector<long> counts(faces.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    long assigned = 0;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const double quota = static_cast<double>(n) * faces[f].measure / total;
        counts[f] = static_cast<long>(std::floor(quota));
        assigned += counts[f];
        remainders.push_back({quota - std::floor(quota), f});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (long r = 0; r < n - assigned; ++r)
        counts[remainders[static_cast<std::size_t>(r) % remainders.size()].second]++;

    out.points.resize(n, d);
    out.regions.assign(static_cast<std::size_t>(n), RegionTag::Boundary);
    Xoshiro256pp rng(seed);
    long row = 0;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& face = faces[f];
        const double pinned = face.high ? domain.upper[face.axis] : domain.lower[face.axis];
        for (long i = 0; i < counts[f]; ++i, ++row) {
            for (int j = 0; j < d; ++j)
                out.points(row, j) =
                    (j == face.axis) ? pinned : open_coord(rng, domain.lower[j], domain.upper[j]);
        }
    }
    return out;
}

LabeledSampleSet sample_initial(const BoxDomain& domain, long n, std::uint64_t seed) {
    if (!domain.time_axis)
        throw ConfigError("sample_initial: domain has no time axis");
    if (n < 0) throw ConfigError("sample_initial: n must be non-negative");
    const int d = domain.dim();
    const int ta = *domain.time_axis;
    LabeledSampleSet out = empty_set(d, seed);
    out.points.resize(n, d);
    out.regions.assign(static_cast<std::size_t>(n), RegionTag::Initial);
    Xoshiro256pp rng(seed);
    for (long i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            out.points(i, j) =
                (j == ta) ? domain.lower[ta] : open_coord(rng, domain.lower[j], domain.upper[j]);
    return out;
}

LabeledSampleSet merge(std::span<const LabeledSampleSet> sets) {
    if (sets.empty()) throw ConfigError("merge: need at least one set");
    int d = -1;
    long total = 0;
    bool all_values = true;
    for (const auto& s : sets) {
        if (s.size() == 0) continue;
        if (d < 0) d = s.dim();
        if (s.dim() != d) throw ShapeError("merge: dimension mismatch");
        total += s.size();
        all_values = all_values && s.values.has_value();
    }
    if (d < 0) d = sets[0].dim();

    LabeledSampleSet out = empty_set(d, sets[0].seed);
    out.points.resize(total, d);
    out.regions.reserve(static_cast<std::size_t>(total));
    if (all_values && total > 0) out.values = Eigen::VectorXd(total);
    long row = 0;
    for (const auto& s : sets) {
        for (long i = 0; i < s.size(); ++i, ++row) {
            out.points.row(row) = s.points.row(i);
            out.regions.push_back(s.region(i));
            if (out.values) (*out.values)[row] = (*s.values)[i];
        }
    }
    return out;
}

LabeledSampleSet merge(std::initializer_list<LabeledSampleSet> sets) {
    return merge(std::span<const LabeledSampleSet>(sets.begin(), sets.size()));
}

LabeledSampleSet sample_problem(const BoxDomain& domain, long n_interior, long n_boundary,
                                long n_initial, std::uint64_t seed) {
    std::vector<LabeledSampleSet> parts;
    parts.push_back(sample_interior(domain, n_interior, derive_seed(seed, 1)));
    parts.push_back(sample_boundary(domain, n_boundary, derive_seed(seed, 2)));
    if (n_initial > 0) parts.push_back(sample_initial(domain, n_initial, derive_seed(seed, 3)));
    LabeledSampleSet out = merge(std::span<const LabeledSampleSet>(parts.data(), parts.size()));
    out.seed = seed;
    return out;
}

void write_csv(const LabeledSampleSet& set, const std::string& path) {
    std::ofstream f(path, std::ios::binary);  // binary: LF endings on every platform
    if (!f) throw ConfigError("write_csv: cannot open " + path);
    for (int j = 0; j < set.dim(); ++j) f << "x_" << (j + 1) << ",";
    f << "region,value\n";
    char buf[40];
    for (long i = 0; i < set.size(); ++i) {
        for (int j = 0; j < set.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", set.points(i, j));
            f << buf << ",";
        }
        f << to_string(set.region(i)) << ",";
        if (set.values) {
            std::snprintf(buf, sizeof buf, "%.17g", (*set.values)[i]);
            f << buf;
        }
        f << "\n";
    }
}

LabeledSampleSet read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("read_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw ConfigError("read_csv: empty file " + path);
    int d = 0;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) {
            if (col.rfind("x_", 0) == 0) ++d;
        }
    }
    if (d < 1) throw ConfigError("read_csv: no coordinate columns in " + path);

    std::vector<double> coords;
    std::vector<RegionTag> regions;
    std::vector<double> values;
    bool all_values = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        for (int j = 0; j < d; ++j) {
            if (!std::getline(ss, field, ','))
                throw ConfigError("read_csv: short row in " + path);
            coords.push_back(std::stod(field));
        }
        if (!std::getline(ss, field, ',')) throw ConfigError("read_csv: missing region in " + path);
        if (field == "interior") regions.push_back(RegionTag::Interior);
        else if (field == "boundary") regions.push_back(RegionTag::Boundary);
        else if (field == "initial") regions.push_back(RegionTag::Initial);
        else throw ConfigError("read_csv: unknown region tag '" + field + "'");
        if (std::getline(ss, field) && !field.empty()) values.push_back(std::stod(field));
        else all_values = false;
    }

    const long n = static_cast<long>(regions.size());
    LabeledSampleSet out;
    out.points.resize(n, d);
    for (long i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            out.points(i, j) = coords[static_cast<std::size_t>(i * d + j)];
    out.regions = std::move(regions);
    if (all_values && n > 0) {
        out.values = Eigen::Map<Eigen::VectorXd>(values.data(), n);
    }
    return out;
}

}  // namespace kernelop
