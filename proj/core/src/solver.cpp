#include "kernelop/solver.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "serialized formats assume a little-endian host");

namespace kernelop {

namespace {

// Per-sample interior coefficient values, evaluated once before the O(N^2)
// pair loop. Boundary/Initial rows never read their slot.
Eigen::MatrixXd coefficient_table(const PdeOperatorSpec& op, const LabeledSampleSet& samples) {
    const long n = samples.size();
    const long t = static_cast<long>(op.interior_terms().size());
    Eigen::MatrixXd coeffs(t, n);
    for (long i = 0; i < n; ++i) {
        if (samples.region(i) != RegionTag::Interior) continue;
        op.coefficients_at(samples.point(i),
                           std::span<double>(coeffs.col(i).data(), static_cast<std::size_t>(t)));
    }
    return coeffs;
}

std::span<const double> col_span(const Eigen::MatrixXd& m, long j) {
    return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}

}  // namespace

GeneralizedGram assemble_gram(const KernelSpec& kernel, const PdeOperatorSpec& op,
                              const LabeledSampleSet& samples) {
    if (op.dimension() != kernel.dimension || samples.dim() != kernel.dimension)
        throw ShapeError("assemble_gram: dimension mismatch");
    if (op.order() > kernel.max_order)
        throw CapabilityError("assemble_gram: operator order exceeds kernel derivative capability");

    const long n = samples.size();
    const Eigen::MatrixXd coeffs = coefficient_table(op, samples);
    GeneralizedGram gram;
    gram.matrix.resize(n, n);

#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) {
        const PointView xi = samples.point(i);
        const RegionTag ri = samples.region(i);
        const auto ci = col_span(coeffs, i);
        for (long j = i; j < n; ++j) {
            PairDerivEvaluator pd(kernel, xi, samples.point(j));
            gram.matrix(i, j) =
                apply_both_pre(op, pd, ri, samples.region(j), ci, col_span(coeffs, j));
        }
    }
    // Mirror the upper triangle: exact symmetry by construction.
    for (long i = 1; i < n; ++i)
        for (long j = 0; j < i; ++j) gram.matrix(i, j) = gram.matrix(j, i);
    return gram;
}

SolutionOperator fit(const GeneralizedGram& gram, const LabeledSampleSet& samples,
                     const SolverConfig& config, const KernelSpec& kernel,
                     const PdeOperatorSpec& op) {
    if (!(config.lambda > 0.0)) throw ConfigError("fit: lambda must be positive");
    const long n = gram.matrix.rows();
    if (n != samples.size() || gram.matrix.cols() != n)
        throw ShapeError("fit: Gram/sample size mismatch");

    const double scale = gram.matrix.trace() / static_cast<double>(n);
    double jitter = config.jitter_start;
    Eigen::MatrixXd system(n, n);
    for (int rung = -1; rung <= SolverConfig::kJitterSteps; ++rung) {
        if (rung >= 0) jitter = SolverConfig::kJitterBase * scale * std::pow(10.0, rung);
        system = gram.matrix;
        system.diagonal().array() += config.lambda * static_cast<double>(n) + jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(system);
        if (llt.info() == Eigen::Success) {
            return SolutionOperator(samples, op, kernel, llt.matrixL(), config.lambda, jitter);
        }
    }
    throw NumericalError("fit: Cholesky failed after the jitter ladder (N=" + std::to_string(n) +
                         ", lambda=" + std::to_string(config.lambda) +
                         ", trace/N=" + std::to_string(scale) + ")");
}

Eigen::VectorXd SolutionOperator::apply(const Eigen::VectorXd& h_values) const {
    if (h_values.size() != size()) throw ShapeError("apply: observation length mismatch");
    Eigen::VectorXd y = chol_lower_.triangularView<Eigen::Lower>().solve(h_values);
    return chol_lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Eigen::MatrixXd SolutionOperator::apply_many(const Eigen::MatrixXd& h_columns) const {
    if (h_columns.rows() != size()) throw ShapeError("apply_many: observation length mismatch");
    Eigen::MatrixXd y = chol_lower_.triangularView<Eigen::Lower>().solve(h_columns);
    return chol_lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Eigen::MatrixXd SolutionOperator::cross_matrix(const PointMatrix& queries) const {
    if (queries.cols() != kernel_.dimension && queries.rows() > 0)
        throw ShapeError("cross_matrix: query dimension mismatch");
    const long q = queries.rows();
    const long n = size();
    const Eigen::MatrixXd coeffs = coefficient_table(op_, samples_);
    Eigen::MatrixXd cross(q, n);
#pragma omp parallel for schedule(static)
    for (long r = 0; r < q; ++r) {
        const PointView x(queries.data() + r * queries.cols(),
                          static_cast<std::size_t>(queries.cols()));
        for (long i = 0; i < n; ++i) {
            PairDerivEvaluator pd(kernel_, samples_.point(i), x);
            cross(r, i) = apply_first_pre(op_, pd, samples_.region(i), col_span(coeffs, i));
        }
    }
    return cross;
}

Eigen::VectorXd SolutionOperator::evaluate(const Eigen::VectorXd& coeffs,
                                           const PointMatrix& queries) const {
    if (coeffs.size() != size()) throw ShapeError("evaluate: coefficient length mismatch");
    return evaluate_many(coeffs, queries).col(0);
}

Eigen::MatrixXd SolutionOperator::evaluate_many(const Eigen::MatrixXd& coeffs,
                                                const PointMatrix& queries) const {
    if (coeffs.rows() != size()) throw ShapeError("evaluate_many: coefficient length mismatch");
    const long q = queries.rows();
    Eigen::MatrixXd out(q, coeffs.cols());
    const long chunk = 2048;
    for (long start = 0; start < q; start += chunk) {
        const long rows = std::min(chunk, q - start);
        PointMatrix block = queries.middleRows(start, rows);
        out.middleRows(start, rows).noalias() = cross_matrix(block) * coeffs;
    }
    if (q == 0) out.setZero();
    return out;
}

Eigen::MatrixXd SolutionOperator::kernel_basis(const PointMatrix& queries) const {
    Eigen::MatrixXd cross = cross_matrix(queries);
    // psi columns: (G + lambda*N*I)^{-1} applied to the cross rows; the system
    // matrix is symmetric so one transposed solve suffices.
    return apply_many(cross.transpose()).transpose();
}

Eigen::VectorXd SolutionOperator::evaluate_partial(const Eigen::VectorXd& coeffs,
                                                   const MultiIndex& alpha,
                                                   const PointMatrix& queries) const {
    if (coeffs.size() != size()) throw ShapeError("evaluate_partial: coefficient length mismatch");
    const long q = queries.rows();
    const long n = size();
    const Eigen::MatrixXd ctab = coefficient_table(op_, samples_);
    Eigen::VectorXd out(q);
#pragma omp parallel for schedule(static)
    for (long r = 0; r < q; ++r) {
        const PointView x(queries.data() + r * queries.cols(),
                          static_cast<std::size_t>(queries.cols()));
        double acc = 0.0;
        for (long i = 0; i < n; ++i) {
            PairDerivEvaluator pd(kernel_, samples_.point(i), x);
            double entry = 0.0;
            if (samples_.region(i) == RegionTag::Interior) {
                const auto ci = col_span(ctab, i);
                const auto& terms = op_.interior_terms();
                for (std::size_t a = 0; a < terms.size(); ++a)
                    entry += ci[a] * pd.deriv(terms[a].index, alpha);
            } else {
                entry = pd.deriv(op_.zero_index(), alpha);
            }
            acc += coeffs[i] * entry;
        }
        out[r] = acc;
    }
    return out;
}

Eigen::VectorXd SolutionOperator::system_residual(const Eigen::VectorXd& coeffs,
                                                  const Eigen::VectorXd& h_values) const {
    Eigen::VectorXd lc = chol_lower_.transpose().triangularView<Eigen::Upper>() * coeffs;
    return h_values - chol_lower_.triangularView<Eigen::Lower>() * lc;
}

namespace {

template <typename T>
void put(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void SolutionOperator::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("SolutionOperator::save: cannot open " + path);
    f.write("KOSO", 4);
    put<std::uint32_t>(f, 1);
    const long n = size();
    put<std::uint64_t>(f, static_cast<std::uint64_t>(n));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(kernel_.dimension));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(op_.order()));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(kernel_.max_order));
    put<double>(f, kernel_.bandwidth);
    put<double>(f, lambda_);
    put<double>(f, jitter_);
    f.write(reinterpret_cast<const char*>(samples_.points.data()),
            static_cast<std::streamsize>(sizeof(double)) * n * kernel_.dimension);
    for (long i = 0; i < n; ++i) put<std::uint8_t>(f, static_cast<std::uint8_t>(samples_.region(i)));
    // packed lower triangle, row-major
    for (long i = 0; i < n; ++i)
        for (long j = 0; j <= i; ++j) put<double>(f, chol_lower_(i, j));
    if (!f) throw ConfigError("SolutionOperator::save: write failed for " + path);
}

SolutionOperator SolutionOperator::load(const std::string& path, PdeOperatorSpec op) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("SolutionOperator::load: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (std::string(magic, 4) != "KOSO")
        throw ConfigError("SolutionOperator::load: bad magic in " + path);
    const auto version = get<std::uint32_t>(f);
    if (version != 1) throw ConfigError("SolutionOperator::load: unsupported version");
    const long n = static_cast<long>(get<std::uint64_t>(f));
    const int d = static_cast<int>(get<std::uint32_t>(f));
    const int order = static_cast<int>(get<std::uint32_t>(f));
    const int max_order = static_cast<int>(get<std::uint32_t>(f));
    const double eta = get<double>(f);
    const double lambda = get<double>(f);
    const double jitter = get<double>(f);
    if (op.dimension() != d || op.order() != order)
        throw ShapeError("SolutionOperator::load: operator does not match the stored header");

    LabeledSampleSet samples;
    samples.points.resize(n, d);
    f.read(reinterpret_cast<char*>(samples.points.data()),
           static_cast<std::streamsize>(sizeof(double)) * n * d);
    samples.regions.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        samples.regions[static_cast<std::size_t>(i)] = static_cast<RegionTag>(get<std::uint8_t>(f));

    Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j <= i; ++j) chol(i, j) = get<double>(f);
    if (!f) throw ConfigError("SolutionOperator::load: truncated file " + path);

    KernelSpec kernel(eta, d, max_order);
    return SolutionOperator(std::move(samples), std::move(op), kernel, std::move(chol), lambda,
                            jitter);
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("write_matrix_csv: cannot open " + path);
    char buf[40];
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            f << buf << (j + 1 < m.cols() ? "," : "");
        }
        f << "\n";
    }
}

}  // namespace kernelop
