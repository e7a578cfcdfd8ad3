#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kernelop/solver.hpp"

namespace kernelop {

/// How the L basis functions anchored at the centers are built.
enum class BasisKind : std::uint8_t {
    /// b_j(x) = [P_s^(1,0) K](z_j, x): the operator applied at the center.
    OperatorApplied = 0,
    /// b_j(x) = window(x) * K(z_j, x) with a window vanishing on the boundary,
    /// so homogeneous Dirichlet data holds exactly.
    Windowed = 1,
};

/// Streaming low-rank regression state: L centers, the L x L normal matrix
/// G = lambda*I + sum_k A_k^T A_k, and per-target right-hand sides
/// b = sum_k A_k^T y_k. Peak auxiliary storage is O(L^2) + O(qL), independent
/// of N, unless the transposed-design store (operator mode) is enabled, which
/// keeps B = A_N^T at O(LN) to serve arbitrary new inputs.
///
/// accumulate() is a serialized reduction: apply batches in index order for
/// reproducible results. design_block() calls for distinct batches may run
/// concurrently.
class LowRankModel {
public:
    /// OperatorApplied basis; centers carry region tags (the operator
    /// collapses to the identity at Boundary/Initial centers).
    static LowRankModel operator_applied(PointMatrix centers, std::vector<RegionTag> center_tags,
                                         const KernelSpec& kernel, PdeOperatorSpec op,
                                         double lambda, long batch_size, int n_targets = 1,
                                         bool store_design = false);

    /// Windowed basis; the window must vanish on the boundary of `domain`
    /// (checked on sampled boundary points at construction, |w| <= 1e-14).
    static LowRankModel windowed(PointMatrix centers, DifferentiableFunction window,
                                 const BoxDomain& domain, const KernelSpec& kernel,
                                 PdeOperatorSpec op, double lambda, long batch_size,
                                 int n_targets = 1);

    long rank() const { return centers_.rows(); }
    int dim() const { return static_cast<int>(centers_.cols()); }
    BasisKind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    long batch_size() const { return batch_size_; }
    long rows_seen() const { return rows_seen_; }
    int n_targets() const { return static_cast<int>(rhs_.cols()); }
    bool stores_design() const { return store_design_; }

    const PointMatrix& centers() const { return centers_; }
    const std::vector<RegionTag>& center_tags() const { return center_tags_; }
    const Eigen::MatrixXd& normal() const { return normal_; }
    const Eigen::MatrixXd& rhs() const { return rhs_; }
    const Eigen::MatrixXd& design_transposed() const { return design_t_; }
    const KernelSpec& kernel() const { return kernel_; }
    const PdeOperatorSpec& op() const { return op_; }
    const DifferentiableFunction& window() const { return window_; }

    friend Eigen::MatrixXd design_block(const LowRankModel& model, const PdeOperatorSpec& op,
                                        const KernelSpec& kernel, const LabeledSampleSet& batch);
    friend void accumulate(LowRankModel& model, const Eigen::MatrixXd& block,
                           const Eigen::MatrixXd& targets);
    friend LowRankModel load_checkpoint(const std::string& path, const KernelSpec& kernel,
                                        PdeOperatorSpec op, DifferentiableFunction window);

private:
    LowRankModel(PointMatrix centers, std::vector<RegionTag> tags, BasisKind kind,
                 DifferentiableFunction window, const KernelSpec& kernel, PdeOperatorSpec op,
                 double lambda, long batch_size, int n_targets, bool store_design);

    PointMatrix centers_;
    std::vector<RegionTag> center_tags_;
    BasisKind kind_;
    DifferentiableFunction window_;
    KernelSpec kernel_;
    PdeOperatorSpec op_;
    Eigen::MatrixXd center_coeffs_;  // interior coefficients at centers (OperatorApplied)
    Eigen::MatrixXd normal_;         // L x L, lambda*I at start
    Eigen::MatrixXd rhs_;            // L x n_targets, 0 at start
    Eigen::MatrixXd design_t_;       // L x rows_seen, operator mode only
    double lambda_;
    long batch_size_;
    long rows_seen_ = 0;
    bool store_design_;
};

/// A[i][j] = (P_s b_j)(X_i), respecting the batch's region tags: the operator
/// acts on Interior rows, the bare basis function is evaluated on
/// Boundary/Initial rows.
Eigen::MatrixXd design_block(const LowRankModel& model, const PdeOperatorSpec& op,
                             const KernelSpec& kernel, const LabeledSampleSet& batch);

/// normal += block^T block; rhs += block^T targets; appends block^T to the
/// design store in operator mode. Targets: q x n_targets.
void accumulate(LowRankModel& model, const Eigen::MatrixXd& block, const Eigen::MatrixXd& targets);
void accumulate(LowRankModel& model, const Eigen::MatrixXd& block, const Eigen::VectorXd& y);

/// Builds the block from a batch (region-tagged design rows) and its target
/// values, then accumulates. The batch must carry values.
void accumulate_batch(LowRankModel& model, const LabeledSampleSet& batch);

/// Streams one CSV shard (schema of write_csv, values required) as a batch.
void accumulate_from_csv(LowRankModel& model, const std::string& path);

/// Per-target mode: solves (A^T A + lambda I) c = A^T y for every target
/// column (L x n_targets). Operator mode: returns W = G^{-1} B, the L x N map
/// from sampled input values to coefficients.
Eigen::MatrixXd finalize(const LowRankModel& model);

/// u(x_q) = sum_j coeffs_j * b_j(x_q) for each query row.
Eigen::VectorXd evaluate_lowrank(const LowRankModel& model, const Eigen::VectorXd& coeffs,
                                 const PointMatrix& queries);
/// Batched variant: coefficient columns L x m -> values Q x m.
Eigen::MatrixXd evaluate_lowrank_many(const LowRankModel& model, const Eigen::MatrixXd& coeffs,
                                      const PointMatrix& queries);

// Binary checkpoint for resumable accumulation (per-target mode), little-endian:
//   magic "KOLR", u32 version = 1,
//   u64 L, u32 d, u8 basis kind, u32 n_targets,
//   f64 lambda, u64 batch_size, u64 rows_seen,
//   f64 eta, u32 kernel max_order,
//   centers L*d f64 row-major, tags L u8,
//   normal  L*L f64 column-major, rhs L*n_targets f64 column-major.
// The kernel/operator/window are reattached by the loader and validated
// against the header where possible.
void save_checkpoint(const LowRankModel& model, const std::string& path);
LowRankModel load_checkpoint(const std::string& path, const KernelSpec& kernel, PdeOperatorSpec op,
                             DifferentiableFunction window = {});

/// The first L Interior-tagged rows of a sample set, the default center rule.
std::pair<PointMatrix, std::vector<RegionTag>> centers_from_samples(const LabeledSampleSet& samples,
                                                                    long count);

/// Independent uniform redraw of L interior centers.
std::pair<PointMatrix, std::vector<RegionTag>> resample_centers(const BoxDomain& domain, long count,
                                                                std::uint64_t seed);

}  // namespace kernelop
