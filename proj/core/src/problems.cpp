#include "kernelop/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numeric>

namespace kernelop {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

[[noreturn]] void partial_unsupported(const MultiIndex& alpha, const char* who) {
    throw CapabilityError(std::string(who) + ": partial " + alpha.to_string() +
                          " not provided by this test family");
}

// ---- Darcy ----------------------------------------------------------------

double darcy_a2(PointView p) { return std::exp(p[0] + p[1]); }

double darcy_a3(PointView p) {
    const long s = static_cast<long>(std::floor(4.0 * p[0])) +
                   static_cast<long>(std::floor(4.0 * p[1]));
    return (s % 2 == 0) ? 1.0 : 10.0;
}

std::vector<OperatorTerm> darcy_terms(int variant) {
    std::vector<OperatorTerm> terms;
    switch (variant) {
        case 1:
            terms.push_back({[](PointView) { return -1.0; }, {2, 0}});
            terms.push_back({[](PointView) { return -1.0; }, {0, 2}});
            break;
        case 2:
            terms.push_back({[](PointView p) { return -darcy_a2(p); }, {2, 0}});
            terms.push_back({[](PointView p) { return -darcy_a2(p); }, {0, 2}});
            // grad a = a * (1, 1) for a = exp(x + y)
            terms.push_back({[](PointView p) { return -darcy_a2(p); }, {1, 0}});
            terms.push_back({[](PointView p) { return -darcy_a2(p); }, {0, 1}});
            break;
        case 3:
            // Piecewise-constant permeability: grad a = 0 off the jump set,
            // which the sampling measure misses with probability one.
            terms.push_back({[](PointView p) { return -darcy_a3(p); }, {2, 0}});
            terms.push_back({[](PointView p) { return -darcy_a3(p); }, {0, 2}});
            break;
        default:
            throw ConfigError("make_darcy: variant must be 1, 2 or 3");
    }
    return terms;
}

// Two-layer tanh network sum_m w_m tanh(v_m . x + b_m) with standard-normal
// weights; first and second partials in closed form via the tanh chain.
DifferentiableFunction darcy_family_member(int k, std::uint64_t seed) {
    constexpr int kUnits = 16;
    struct Unit {
        double w, v0, v1, b;
    };
    auto units = std::make_shared<std::vector<Unit>>();
    Xoshiro256pp rng(derive_seed(seed, 0xDA0 + static_cast<std::uint64_t>(k)));
    for (int m = 0; m < kUnits; ++m)
        units->push_back({rng.normal(), rng.normal(), rng.normal(), rng.normal()});

    auto accum = [units](PointView x, int dx, int dy) {
        double acc = 0.0;
        for (const Unit& u : *units) {
            const double t = std::tanh(u.v0 * x[0] + u.v1 * x[1] + u.b);
            const double sech2 = 1.0 - t * t;
            const int order = dx + dy;
            double core;
            if (order == 0) core = t;
            else if (order == 1) core = sech2;
            else core = -2.0 * t * sech2;  // d2/dz2 tanh(z)
            double chain = 1.0;
            for (int i = 0; i < dx; ++i) chain *= u.v0;
            for (int i = 0; i < dy; ++i) chain *= u.v1;
            acc += u.w * chain * core;
        }
        return acc;
    };

    DifferentiableFunction f;
    f.value = [accum](PointView x) { return accum(x, 0, 0); };
    f.partial = [accum](const MultiIndex& alpha, PointView x) {
        if (alpha.dim() != 2 || alpha.order() > 2) partial_unsupported(alpha, "darcy family");
        return accum(x, alpha[0], alpha[1]);
    };
    return f;
}

// ---- Helmholtz -------------------------------------------------------------

DifferentiableFunction helmholtz_family_member(double omega, int k, std::uint64_t seed) {
    Xoshiro256pp rng(derive_seed(seed, 0x4E0 + static_cast<std::uint64_t>(k)));
    const double phi = kTwoPi * rng.uniform01();
    const double wk = omega * (0.7 + 0.6 * rng.uniform01());

    auto eval_order = [phi, wk](PointView p, int order) {
        const double x = p[0];
        const double w = x * (1.0 - x), wp = 1.0 - 2.0 * x, wpp = -2.0;
        const double s = std::sin(wk * x + phi), c = std::cos(wk * x + phi);
        switch (order) {
            case 0: return -0.1 + 0.2 * x + w * s;
            case 1: return 0.2 + wp * s + w * wk * c;
            case 2: return wpp * s + 2.0 * wp * wk * c - w * wk * wk * s;
        }
        return 0.0;
    };

    DifferentiableFunction f;
    f.value = [eval_order](PointView x) { return eval_order(x, 0); };
    f.partial = [eval_order](const MultiIndex& alpha, PointView x) {
        if (alpha.dim() != 1 || alpha.order() > 2) partial_unsupported(alpha, "helmholtz family");
        return eval_order(x, alpha.order());
    };
    return f;
}

// ---- Schroedinger ----------------------------------------------------------

double hexagon_potential(PointView p) {
    const double u = std::abs(p[0] - 0.5);
    const double v = std::abs(p[1] - 0.5);
    const double m = std::max(u, 0.5 * u + 0.5 * std::sqrt(3.0) * v);
    return m <= 0.2 ? 1000.0 : 0.0;
}

// 1.5 x(1-x) y(1-y) [ sin(ax+p1) sin(by+p2) + 0.5 cos(cx+p1) + 0.35 sin(ax+by+p2) ]
// with a = 2 pi m, b = 2 pi n, c = 2 pi (m+n).
DifferentiableFunction schrodinger_family_member(int k, std::uint64_t /*seed*/) {
    const int i = (k / 10) % 10, j = k % 10;
    const double m = static_cast<double>(i % 4 + 1), n = static_cast<double>(j % 4 + 1);
    const double p1 = kTwoPi * i / 10.0, p2 = kTwoPi * j / 10.0;
    const double a = kTwoPi * m, b = kTwoPi * n, c = kTwoPi * (m + n);

    auto eval_pp = [=](PointView pt, int dx, int dy) {
        const double x = pt[0], y = pt[1];
        const double S1 = std::sin(a * x + p1), C1 = std::cos(a * x + p1);
        const double S2 = std::sin(b * y + p2), C2 = std::cos(b * y + p2);
        const double C3 = std::cos(c * x + p1), S3 = std::sin(c * x + p1);
        const double S4 = std::sin(a * x + b * y + p2), C4 = std::cos(a * x + b * y + p2);
        double f, fx, fy, fxx, fyy, fxy;
        f = S1 * S2 + 0.5 * C3 + 0.35 * S4;
        fx = a * C1 * S2 - 0.5 * c * S3 + 0.35 * a * C4;
        fy = b * S1 * C2 + 0.35 * b * C4;
        fxx = -a * a * S1 * S2 - 0.5 * c * c * C3 - 0.35 * a * a * S4;
        fyy = -b * b * S1 * S2 - 0.35 * b * b * S4;
        fxy = a * b * C1 * C2 - 0.35 * a * b * S4;

        const double P = x * (1.0 - x), Pp = 1.0 - 2.0 * x, Ppp = -2.0;
        const double Q = y * (1.0 - y), Qp = 1.0 - 2.0 * y, Qpp = -2.0;
        const double A = 1.5;
        if (dx == 0 && dy == 0) return A * P * Q * f;
        if (dx == 1 && dy == 0) return A * (Pp * Q * f + P * Q * fx);
        if (dx == 0 && dy == 1) return A * (P * Qp * f + P * Q * fy);
        if (dx == 2 && dy == 0) return A * (Ppp * Q * f + 2.0 * Pp * Q * fx + P * Q * fxx);
        if (dx == 0 && dy == 2) return A * (P * Qpp * f + 2.0 * P * Qp * fy + P * Q * fyy);
        return A * (Pp * Qp * f + Pp * Q * fy + P * Qp * fx + P * Q * fxy);  // (1,1)
    };

    DifferentiableFunction f;
    f.value = [eval_pp](PointView x) { return eval_pp(x, 0, 0); };
    f.partial = [eval_pp](const MultiIndex& alpha, PointView x) {
        if (alpha.dim() != 2 || alpha.order() > 2) partial_unsupported(alpha, "schrodinger family");
        return eval_pp(x, alpha[0], alpha[1]);
    };
    return f;
}

// ---- Heat -------------------------------------------------------------------

// 1.2 x(1-x) [ sin(ax+p1) e^{-rt} + 0.3 sin(bx) e^{-(r+1)t} ], a = 2 pi m,
// b = 2 pi (m+1); coordinates are (x, t).
DifferentiableFunction heat_family_member(int k, std::uint64_t /*seed*/) {
    const int i = (k / 10) % 10, j = k % 10;
    const double m = static_cast<double>(i % 4 + 1);
    const double r = static_cast<double>(j % 4 + 1);
    const double p1 = kTwoPi * i / 10.0;
    const double a = kTwoPi * m, b = kTwoPi * (m + 1.0);

    auto eval_pp = [=](PointView pt, int dx, int dt) {
        const double x = pt[0], t = pt[1];
        const double S1 = std::sin(a * x + p1), C1 = std::cos(a * x + p1);
        const double S2 = std::sin(b * x), C2 = std::cos(b * x);
        const double E1 = std::exp(-r * t), E2 = std::exp(-(r + 1.0) * t);
        const double P = x * (1.0 - x), Pp = 1.0 - 2.0 * x, Ppp = -2.0;
        const double B = 1.2;
        double F, Fx, Fxx, Ft, Fxt, Ftt;
        F = S1 * E1 + 0.3 * S2 * E2;
        Fx = a * C1 * E1 + 0.3 * b * C2 * E2;
        Fxx = -a * a * S1 * E1 - 0.3 * b * b * S2 * E2;
        Ft = -r * S1 * E1 - 0.3 * (r + 1.0) * S2 * E2;
        Fxt = -r * a * C1 * E1 - 0.3 * (r + 1.0) * b * C2 * E2;
        Ftt = r * r * S1 * E1 + 0.3 * (r + 1.0) * (r + 1.0) * S2 * E2;
        if (dx == 0 && dt == 0) return B * P * F;
        if (dx == 1 && dt == 0) return B * (Pp * F + P * Fx);
        if (dx == 2 && dt == 0) return B * (Ppp * F + 2.0 * Pp * Fx + P * Fxx);
        if (dx == 0 && dt == 1) return B * P * Ft;
        if (dx == 1 && dt == 1) return B * (Pp * Ft + P * Fxt);
        return B * P * Ftt;  // (0,2)
    };

    DifferentiableFunction f;
    f.value = [eval_pp](PointView x) { return eval_pp(x, 0, 0); };
    f.partial = [eval_pp](const MultiIndex& alpha, PointView x) {
        if (alpha.dim() != 2 || alpha.order() > 2) partial_unsupported(alpha, "heat family");
        return eval_pp(x, alpha[0], alpha[1]);
    };
    return f;
}

// ---- Poisson 3D -------------------------------------------------------------

// d^p/dx^p sin(w x) = w^p sin(w x + p pi/2), exact for any order.
double sin_deriv(double w, double x, int p) {
    return std::pow(w, p) * std::sin(w * x + 0.5 * M_PI * static_cast<double>(p));
}

DifferentiableFunction poisson3d_family_member(int k, std::uint64_t seed) {
    constexpr int kMax = 4;
    // Seeded permutation of the 64 modes; member k takes perm[k mod 64].
    std::array<int, kMax * kMax * kMax> perm{};
    std::iota(perm.begin(), perm.end(), 0);
    Xoshiro256pp rng(derive_seed(seed, 0x3D));
    for (int i = static_cast<int>(perm.size()) - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
    const int mode = perm[static_cast<std::size_t>(k) % perm.size()];
    const double k1 = static_cast<double>(mode / 16 + 1);
    const double k2 = static_cast<double>((mode / 4) % 4 + 1);
    const double k3 = static_cast<double>(mode % 4 + 1);

    DifferentiableFunction f;
    f.value = [k1, k2, k3](PointView x) {
        return std::sin(M_PI * k1 * x[0]) * std::sin(M_PI * k2 * x[1]) *
               std::sin(M_PI * k3 * x[2]);
    };
    f.partial = [k1, k2, k3](const MultiIndex& alpha, PointView x) {
        if (alpha.dim() != 3) partial_unsupported(alpha, "poisson3d family");
        return sin_deriv(M_PI * k1, x[0], alpha[0]) * sin_deriv(M_PI * k2, x[1], alpha[1]) *
               sin_deriv(M_PI * k3, x[2], alpha[2]);
    };
    return f;
}

}  // namespace

PdeProblem make_darcy(int variant) {
    PdeProblem p{"darcy-a" + std::to_string(variant),
                 PdeOperatorSpec(2, darcy_terms(variant)),
                 BoxDomain::unit_cube(2),
                 {},
                 {}};
    p.defaults.n_interior = 2500;
    p.defaults.n_boundary = 1500;
    p.defaults.eta = 1.0;
    // Effective ridge 5e-5 * I at the default N = 4000 (the solver scales
    // the configured lambda by N).
    p.defaults.lambda = 1.25e-8;
    p.defaults.family_size = 50;
    p.family = {[](int k, std::uint64_t seed) { return darcy_family_member(k, seed); }, 50};
    return p;
}

PdeProblem make_helmholtz(double omega) {
    if (!(omega > 0.0)) throw ConfigError("make_helmholtz: omega must be positive");
    std::vector<OperatorTerm> terms;
    terms.push_back({[](PointView) { return -1.0; }, {2}});
    terms.push_back({[omega](PointView) { return -omega * omega; }, {0}});
    PdeProblem p{"helmholtz-" + std::to_string(static_cast<long>(omega)),
                 PdeOperatorSpec(1, std::move(terms)),
                 BoxDomain::unit_cube(1),
                 {},
                 {}};
    // Paper totals N = 1000; the two endpoint samples come out of that count.
    p.defaults.n_interior = 998;
    p.defaults.n_boundary = 2;
    p.defaults.eta = omega >= 100.0 ? 0.01 : 0.1;
    p.defaults.lambda = 1e-7;
    p.defaults.family_size = 100;
    p.family = {[omega](int k, std::uint64_t seed) { return helmholtz_family_member(omega, k, seed); },
                100};
    return p;
}

PdeProblem make_schrodinger() {
    std::vector<OperatorTerm> terms;
    terms.push_back({[](PointView) { return -1.0; }, {2, 0}});
    terms.push_back({[](PointView) { return -1.0; }, {0, 2}});
    terms.push_back({[](PointView p) { return hexagon_potential(p); }, {0, 0}});
    PdeProblem p{"schrodinger", PdeOperatorSpec(2, std::move(terms)), BoxDomain::unit_cube(2), {}, {}};
    p.defaults.n_interior = 1200;
    p.defaults.n_boundary = 800;
    p.defaults.eta = 0.08;
    // Effective ridge 3e-3 * I at the default N = 2000.
    p.defaults.lambda = 1.5e-6;
    p.defaults.family_size = 100;
    p.family = {[](int k, std::uint64_t seed) { return schrodinger_family_member(k, seed); }, 100};
    return p;
}

PdeProblem make_heat() {
    std::vector<OperatorTerm> terms;
    terms.push_back({[](PointView) { return 1.0; }, {0, 1}});    // du/dt
    terms.push_back({[](PointView) { return -0.1; }, {2, 0}});   // -alpha d2u/dx2
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(2), up = Eigen::VectorXd::Ones(2);
    PdeProblem p{"heat", PdeOperatorSpec(2, std::move(terms)), BoxDomain(lo, up, 1), {}, {}};
    p.defaults.n_interior = 1800;
    p.defaults.n_boundary = 1800;
    p.defaults.n_initial = 1400;
    p.defaults.eta = 0.08;
    // Effective ridge 1e-5 * I at the default N = 5000.
    p.defaults.lambda = 2e-9;
    p.defaults.family_size = 100;
    p.family = {[](int k, std::uint64_t seed) { return heat_family_member(k, seed); }, 100};
    return p;
}

PdeProblem make_poisson3d() {
    std::vector<OperatorTerm> terms;
    terms.push_back({[](PointView) { return -1.0; }, {2, 0, 0}});
    terms.push_back({[](PointView) { return -1.0; }, {0, 2, 0}});
    terms.push_back({[](PointView) { return -1.0; }, {0, 0, 2}});
    PdeProblem p{"poisson3d", PdeOperatorSpec(3, std::move(terms)), BoxDomain::unit_cube(3), {}, {}};
    p.defaults.n_interior = 10000;
    p.defaults.n_boundary = 0;
    p.defaults.eta = 0.2;
    p.defaults.lambda = 1e-8;
    p.defaults.family_size = 50;
    p.defaults.centers = 5000;
    p.defaults.batch = 2000;
    p.defaults.basis = "windowed";
    p.family = {[](int k, std::uint64_t seed) { return poisson3d_family_member(k, seed); }, 50};
    return p;
}

PdeProblem problem_by_name(const std::string& name) {
    if (name == "darcy-a1") return make_darcy(1);
    if (name == "darcy-a2") return make_darcy(2);
    if (name == "darcy-a3") return make_darcy(3);
    if (name == "helmholtz-20") return make_helmholtz(20.0);
    if (name == "helmholtz-200") return make_helmholtz(200.0);
    if (name == "schrodinger") return make_schrodinger();
    if (name == "heat") return make_heat();
    if (name == "poisson3d") return make_poisson3d();
    throw ConfigError("unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() {
    return {"darcy-a1",      "darcy-a2", "darcy-a3", "helmholtz-20",
            "helmholtz-200", "schrodinger", "heat",  "poisson3d"};
}

Eigen::VectorXd forcing_from_solution(const PdeProblem& problem, const DifferentiableFunction& u,
                                      const LabeledSampleSet& samples) {
    if (samples.dim() != problem.op.dimension())
        throw ShapeError("forcing_from_solution: sample dimension mismatch");
    Eigen::VectorXd h(samples.size());
    for (long i = 0; i < samples.size(); ++i)
        h[i] = apply_to_function(problem.op, u, samples.point(i), samples.region(i));
    return h;
}

PointMatrix evaluation_grid(const PdeProblem& problem, std::uint64_t seed) {
    const BoxDomain& box = problem.domain;
    const int d = box.dim();
    if (d == 1) {
        const long n = 101;
        PointMatrix g(n, 1);
        for (long i = 0; i < n; ++i)
            g(i, 0) = box.lower[0] + (box.upper[0] - box.lower[0]) * static_cast<double>(i) /
                                         static_cast<double>(n - 1);
        return g;
    }
    if (d == 2) {
        const long n = 101;
        PointMatrix g(n * n, 2);
        long row = 0;
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j, ++row) {
                g(row, 0) = box.lower[0] + (box.upper[0] - box.lower[0]) * static_cast<double>(i) /
                                               static_cast<double>(n - 1);
                g(row, 1) = box.lower[1] + (box.upper[1] - box.lower[1]) * static_cast<double>(j) /
                                               static_cast<double>(n - 1);
            }
        return g;
    }
    if (d == 3) {
        const long n = 41;
        const long total = n * n * n;
        const long keep = 20000;
        // Partial Fisher-Yates over grid indices for a seeded subsample.
        std::vector<long> idx(static_cast<std::size_t>(total));
        std::iota(idx.begin(), idx.end(), 0);
        Xoshiro256pp rng(derive_seed(seed, 0x6D1D));
        PointMatrix g(keep, 3);
        for (long r = 0; r < keep; ++r) {
            const long pick =
                r + static_cast<long>(rng.below(static_cast<std::uint64_t>(total - r)));
            std::swap(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(pick)]);
            const long id = idx[static_cast<std::size_t>(r)];
            const long i = id / (n * n), j = (id / n) % n, k = id % n;
            g(r, 0) = box.lower[0] + (box.upper[0] - box.lower[0]) * static_cast<double>(i) /
                                         static_cast<double>(n - 1);
            g(r, 1) = box.lower[1] + (box.upper[1] - box.lower[1]) * static_cast<double>(j) /
                                         static_cast<double>(n - 1);
            g(r, 2) = box.lower[2] + (box.upper[2] - box.lower[2]) * static_cast<double>(k) /
                                         static_cast<double>(n - 1);
        }
        return g;
    }
    throw CapabilityError("evaluation_grid: no grid rule for dimension " + std::to_string(d));
}

Eigen::VectorXd values_on_grid(const DifferentiableFunction& u, const PointMatrix& grid) {
    Eigen::VectorXd v(grid.rows());
    for (long i = 0; i < grid.rows(); ++i)
        v[i] = u.value(PointView(grid.data() + i * grid.cols(),
                                 static_cast<std::size_t>(grid.cols())));
    return v;
}

DifferentiableFunction tensor_window(int dim) {
    DifferentiableFunction w;
    w.value = [dim](PointView x) {
        double p = 1.0;
        for (int i = 0; i < dim; ++i) p *= x[static_cast<std::size_t>(i)] *
                                           (1.0 - x[static_cast<std::size_t>(i)]);
        return p;
    };
    w.partial = [dim](const MultiIndex& alpha, PointView x) {
        if (alpha.dim() != dim) partial_unsupported(alpha, "tensor window");
        double p = 1.0;
        for (int i = 0; i < dim; ++i) {
            const double xi = x[static_cast<std::size_t>(i)];
            switch (alpha[i]) {
                case 0: p *= xi * (1.0 - xi); break;
                case 1: p *= 1.0 - 2.0 * xi; break;
                case 2: p *= -2.0; break;
                default: return 0.0;  // third and higher derivatives vanish
            }
        }
        return p;
    };
    return w;
}

}  // namespace kernelop
