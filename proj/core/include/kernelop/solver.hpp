#pragma once

#include <Eigen/Dense>
#include <string>

#include "kernelop/sampling.hpp"

namespace kernelop {

/// N x N matrix with entries apply_both over all sample pairs. Symmetric by
/// construction (upper triangle computed, then mirrored) and positive
/// semidefinite up to rounding.
struct GeneralizedGram {
    Eigen::MatrixXd matrix;
};

struct SolverConfig {
    double lambda;              ///< Tikhonov parameter; the solve adds lambda*N*I
    double jitter_start = 0.0;  ///< extra diagonal before the escalation ladder

    /// On factorization failure the diagonal is bumped by
    /// 1e-12 * trace(G)/N * 10^k for k = 0..6 until it succeeds.
    static constexpr double kJitterBase = 1e-12;
    static constexpr int kJitterSteps = 6;
};

/// G[i][j] = apply_both(op, kernel, X_i, tag_i, X_j, tag_j). Row-parallel with
/// deterministic write locations, so the result is identical for any thread
/// count.
GeneralizedGram assemble_gram(const KernelSpec& kernel, const PdeOperatorSpec& op,
                              const LabeledSampleSet& samples);

/// The fitted object: collocation samples plus a Cholesky factorization of
/// (G + lambda*N*I). Realizes the regularized solve c = (G + lambda*N*I)^{-1} Y
/// and the expansion u(x) = sum_i c_i * [P_s^(1,0) K](X_i, x); the kernel
/// basis columns are the same expansion applied to the inverse matrix rows,
/// making the fit a reusable solution operator.
///
/// Immutable after fit(); safe to share across threads for apply/evaluate.
class SolutionOperator {
public:
    const LabeledSampleSet& samples() const { return samples_; }
    const PdeOperatorSpec& op() const { return op_; }
    const KernelSpec& kernel() const { return kernel_; }
    double lambda() const { return lambda_; }
    /// Diagonal bump actually used (0 when the first factorization succeeded).
    double jitter() const { return jitter_; }
    long size() const { return samples_.size(); }

    /// c = (G + lambda*N*I)^{-1} h via the stored factorization.
    Eigen::VectorXd apply(const Eigen::VectorXd& h_values) const;
    /// Column-wise apply for a batch of observation vectors (N x M).
    Eigen::MatrixXd apply_many(const Eigen::MatrixXd& h_columns) const;

    /// [Q x N] cross matrix C[q][i] = apply_first(op, kernel, X_i, tag_i, x_q).
    Eigen::MatrixXd cross_matrix(const PointMatrix& queries) const;

    /// u(x_q) = sum_i c_i * apply_first(...) for each query row.
    Eigen::VectorXd evaluate(const Eigen::VectorXd& coeffs, const PointMatrix& queries) const;
    /// Batched evaluation of many coefficient vectors (N x M -> Q x M),
    /// chunked over queries so no Q x N buffer is materialized.
    Eigen::MatrixXd evaluate_many(const Eigen::MatrixXd& coeffs, const PointMatrix& queries) const;

    /// [Q x N] matrix whose column i is the kernel basis function psi_i at the
    /// queries; kernel_basis(Q) * h == evaluate(apply(h), Q) by construction.
    Eigen::MatrixXd kernel_basis(const PointMatrix& queries) const;

    /// Diagnostic: d^alpha of the fitted expansion at the queries.
    Eigen::VectorXd evaluate_partial(const Eigen::VectorXd& coeffs, const MultiIndex& alpha,
                                     const PointMatrix& queries) const;

    /// Residual b - (G + lambda*N*I + jitter*I) c for diagnostics/tests; uses
    /// the factorization's reconstruction L L^T.
    Eigen::VectorXd system_residual(const Eigen::VectorXd& coeffs,
                                    const Eigen::VectorXd& h_values) const;

    // Binary snapshot, little-endian:
    //   magic "KOSO", u32 version = 1,
    //   u64 N, u32 d, u32 operator order, u32 kernel max_order,
    //   f64 eta, f64 lambda, f64 jitter,
    //   points     N*d f64, row-major,
    //   tags       N   u8,
    //   factor     N*(N+1)/2 f64, lower triangle of L, row-major packed.
    // Coefficient functions are not serializable; load() reattaches the
    // caller's operator spec (its dimension/order must match the header).
    void save(const std::string& path) const;
    static SolutionOperator load(const std::string& path, PdeOperatorSpec op);

    friend SolutionOperator fit(const GeneralizedGram&, const LabeledSampleSet&,
                                const SolverConfig&, const KernelSpec&, const PdeOperatorSpec&);

private:
    SolutionOperator(LabeledSampleSet samples, PdeOperatorSpec op, KernelSpec kernel,
                     Eigen::MatrixXd chol_lower, double lambda, double jitter)
        : samples_(std::move(samples)),
          op_(std::move(op)),
          kernel_(kernel),
          chol_lower_(std::move(chol_lower)),
          lambda_(lambda),
          jitter_(jitter) {}

    LabeledSampleSet samples_;
    PdeOperatorSpec op_;
    KernelSpec kernel_;
    Eigen::MatrixXd chol_lower_;  // L with G + lambda*N*I + jitter*I = L L^T
    double lambda_;
    double jitter_;
};

/// Cholesky-factorizes (G + lambda*N*I), escalating the jitter ladder if the
/// factorization breaks down; throws NumericalError with diagnostics after
/// the last rung.
SolutionOperator fit(const GeneralizedGram& gram, const LabeledSampleSet& samples,
                     const SolverConfig& config, const KernelSpec& kernel,
                     const PdeOperatorSpec& op);

/// Debug export of any matrix (Gram, kernel basis) as CSV, no header row.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

}  // namespace kernelop
