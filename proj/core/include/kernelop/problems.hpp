#pragma once

#include <string>
#include <vector>

#include "kernelop/sampling.hpp"

namespace kernelop {

/// Experiment parameters a problem ships with; CLI overrides win field by field.
struct ProblemDefaults {
    long n_interior = 0;
    long n_boundary = 0;
    long n_initial = 0;
    double eta = 1.0;
    double lambda = 1e-5;
    int family_size = 50;
    long centers = 0;         ///< L, low-rank runs only
    long batch = 0;           ///< q, low-rank runs only
    std::string basis = "dense";  ///< dense | operator | windowed
};

/// Deterministic generator of exact test solutions; member k under a seed
/// always yields the same function, with analytic partials up to the
/// operator's order.
struct TestFamilySpec {
    std::function<DifferentiableFunction(int k, std::uint64_t seed)> generator;
    int size = 0;
};

struct PdeProblem {
    std::string name;
    PdeOperatorSpec op;
    BoxDomain domain;
    ProblemDefaults defaults;
    TestFamilySpec family;
};

/// -div(a grad u) on (0,1)^2, expanded to -a*Lap(u) - grad(a).grad(u);
/// variant 1: a = 1, variant 2: a = exp(x+y), variant 3: checkerboard 1/10.
/// Test family: random two-layer tanh networks with closed-form partials.
PdeProblem make_darcy(int variant);

/// -u'' - omega^2 u on (0,1), Dirichlet u(0) = -0.1, u(1) = 0.1.
PdeProblem make_helmholtz(double omega);

/// -Lap(u) + V u on (0,1)^2 with a hexagonal potential well of height 1000.
PdeProblem make_schrodinger();

/// du/dt - 0.1 d2u/dx2 on the space-time box [0,1]x[0,1], time axis 1.
PdeProblem make_heat();

/// -Lap(u) on (0,1)^3 with homogeneous Dirichlet data; eigenfunction family.
PdeProblem make_poisson3d();

/// darcy-a1, darcy-a2, darcy-a3, helmholtz-20, helmholtz-200, schrodinger,
/// heat, poisson3d.
PdeProblem problem_by_name(const std::string& name);
std::vector<std::string> problem_names();

/// The exact data vector for a manufactured solution: the PDE operator
/// applied to u on interior points, u itself on boundary/initial points.
Eigen::VectorXd forcing_from_solution(const PdeProblem& problem, const DifferentiableFunction& u,
                                      const LabeledSampleSet& samples);

/// Error-metric evaluation points: 101 (1D) and 101x101 (2D) uniform tensor
/// grids over the closed box; in 3D a 41^3 grid subsampled to 20000 points
/// under the given seed.
PointMatrix evaluation_grid(const PdeProblem& problem, std::uint64_t seed);

/// Truth values of a family member on a grid.
Eigen::VectorXd values_on_grid(const DifferentiableFunction& u, const PointMatrix& grid);

/// prod_l x_l (1 - x_l): the boundary-adapted window on the unit cube.
DifferentiableFunction tensor_window(int dim);

}  // namespace kernelop
