#include "kernelop/lowrank.hpp"

#include <bit>
#include <cmath>
#include <fstream>

namespace kernelop {

namespace {

Eigen::MatrixXd interior_coefficients(const PdeOperatorSpec& op, const PointMatrix& pts,
                                      const std::vector<RegionTag>& tags) {
    const long n = pts.rows();
    const long t = static_cast<long>(op.interior_terms().size());
    Eigen::MatrixXd coeffs(t, n);
    for (long i = 0; i < n; ++i) {
        if (tags[static_cast<std::size_t>(i)] != RegionTag::Interior) continue;
        PointView x(pts.data() + i * pts.cols(), static_cast<std::size_t>(pts.cols()));
        op.coefficients_at(x, std::span<double>(coeffs.col(i).data(), static_cast<std::size_t>(t)));
    }
    return coeffs;
}

std::span<const double> col_span(const Eigen::MatrixXd& m, long j) {
    return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}

// Precomputed Leibniz splits of one operator term: gamma + rest = alpha with
// the binomial weights, so the per-row window partials are evaluated once and
// reused across all centers.
struct LeibnizPlan {
    MultiIndex alpha;
    std::vector<MultiIndex> gammas;
    std::vector<MultiIndex> rests;
    std::vector<double> binoms;
};

std::vector<LeibnizPlan> make_leibniz_plans(const PdeOperatorSpec& op) {
    std::vector<LeibnizPlan> plans;
    const int d = op.dimension();
    for (const auto& term : op.interior_terms()) {
        LeibnizPlan plan;
        plan.alpha = term.index;
        MultiIndex gamma = MultiIndex::zero(d);
        MultiIndex rest = term.index;
        while (true) {
            plan.gammas.push_back(gamma);
            plan.rests.push_back(rest);
            plan.binoms.push_back(multi_binomial(term.index, gamma));
            int axis = 0;
            for (; axis < d; ++axis) {
                if (gamma[axis] < term.index[axis]) {
                    gamma.set(axis, gamma[axis] + 1);
                    rest.set(axis, rest[axis] - 1);
                    break;
                }
                gamma.set(axis, 0);
                rest.set(axis, term.index[axis]);
            }
            if (axis == d) break;
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

}  // namespace

LowRankModel::LowRankModel(PointMatrix centers, std::vector<RegionTag> tags, BasisKind kind,
                           DifferentiableFunction window, const KernelSpec& kernel,
                           PdeOperatorSpec op, double lambda, long batch_size, int n_targets,
                           bool store_design)
    : centers_(std::move(centers)),
      center_tags_(std::move(tags)),
      kind_(kind),
      window_(std::move(window)),
      kernel_(kernel),
      op_(std::move(op)),
      lambda_(lambda),
      batch_size_(batch_size),
      store_design_(store_design) {
    if (!(lambda > 0.0)) throw ConfigError("LowRankModel: lambda must be positive");
    if (batch_size < 1) throw ConfigError("LowRankModel: batch size must be positive");
    if (n_targets < 1) throw ConfigError("LowRankModel: need at least one target");
    if (centers_.rows() < 1) throw ConfigError("LowRankModel: need at least one center");
    if (centers_.cols() != kernel_.dimension)
        throw ShapeError("LowRankModel: center/kernel dimension mismatch");
    if (center_tags_.size() != static_cast<std::size_t>(centers_.rows()))
        throw ShapeError("LowRankModel: one region tag per center required");
    if (op_.order() > kernel_.max_order)
        throw CapabilityError("LowRankModel: operator order exceeds kernel capability");

    const long L = centers_.rows();
    normal_ = Eigen::MatrixXd::Identity(L, L) * lambda_;
    rhs_ = Eigen::MatrixXd::Zero(L, n_targets);
    if (kind_ == BasisKind::OperatorApplied)
        center_coeffs_ = interior_coefficients(op_, centers_, center_tags_);
}

LowRankModel LowRankModel::operator_applied(PointMatrix centers, std::vector<RegionTag> center_tags,
                                            const KernelSpec& kernel, PdeOperatorSpec op,
                                            double lambda, long batch_size, int n_targets,
                                            bool store_design) {
    return LowRankModel(std::move(centers), std::move(center_tags), BasisKind::OperatorApplied, {},
                        kernel, std::move(op), lambda, batch_size, n_targets, store_design);
}

LowRankModel LowRankModel::windowed(PointMatrix centers, DifferentiableFunction window,
                                    const BoxDomain& domain, const KernelSpec& kernel,
                                    PdeOperatorSpec op, double lambda, long batch_size,
                                    int n_targets) {
    if (!window.value || !window.partial)
        throw ConfigError("LowRankModel::windowed: window must supply value and partials");
    const LabeledSampleSet probe = sample_boundary(domain, 256, 0xB0);
    for (long i = 0; i < probe.size(); ++i)
        if (std::abs(window.value(probe.point(i))) > 1e-14)
            throw ConfigError("LowRankModel::windowed: window does not vanish on the boundary");
    std::vector<RegionTag> tags(static_cast<std::size_t>(centers.rows()), RegionTag::Interior);
    return LowRankModel(std::move(centers), std::move(tags), BasisKind::Windowed,
                        std::move(window), kernel, std::move(op), lambda, batch_size, n_targets,
                        /*store_design=*/false);
}

Eigen::MatrixXd design_block(const LowRankModel& model, const PdeOperatorSpec& op,
                             const KernelSpec& kernel, const LabeledSampleSet& batch) {
    if (batch.dim() != model.dim() && batch.size() > 0)
        throw ShapeError("design_block: batch dimension mismatch");
    const long q = batch.size();
    const long L = model.rank();
    Eigen::MatrixXd block(q, L);
    if (q == 0) return block;

    if (model.kind_ == BasisKind::OperatorApplied) {
        const Eigen::MatrixXd row_coeffs = interior_coefficients(op, batch.points, batch.regions);
        const Eigen::MatrixXd& cen_coeffs = model.center_coeffs_;
#pragma omp parallel for schedule(static)
        for (long i = 0; i < q; ++i) {
            const PointView xi = batch.point(i);
            const RegionTag ri = batch.region(i);
            const auto ci = col_span(row_coeffs, i);
            for (long j = 0; j < L; ++j) {
                PointView zj(model.centers_.data() + j * model.centers_.cols(),
                             static_cast<std::size_t>(model.centers_.cols()));
                PairDerivEvaluator pd(kernel, xi, zj);
                block(i, j) = apply_both_pre(op, pd, ri,
                                             model.center_tags_[static_cast<std::size_t>(j)], ci,
                                             col_span(cen_coeffs, j));
            }
        }
        return block;
    }

    // Windowed basis: P_s(window * K(z_j, .)) on interior rows via the
    // Leibniz expansion, window(x) * K(z_j, x) on boundary/initial rows.
    const std::vector<LeibnizPlan> plans = make_leibniz_plans(op);
    const Eigen::MatrixXd row_coeffs = interior_coefficients(op, batch.points, batch.regions);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < q; ++i) {
        const PointView xi = batch.point(i);
        if (batch.region(i) != RegionTag::Interior) {
            const double w = model.window_.value(xi);
            for (long j = 0; j < L; ++j) {
                PointView zj(model.centers_.data() + j * model.centers_.cols(),
                             static_cast<std::size_t>(model.centers_.cols()));
                block(i, j) = w * eval(kernel, zj, xi);
            }
            continue;
        }
        // Window partials depend on the row only; evaluate once per plan split.
        std::vector<std::vector<double>> wpart(plans.size());
        for (std::size_t t = 0; t < plans.size(); ++t) {
            wpart[t].resize(plans[t].gammas.size());
            for (std::size_t s = 0; s < plans[t].gammas.size(); ++s)
                wpart[t][s] = plans[t].binoms[s] * model.window_.partial(plans[t].gammas[s], xi);
        }
        const auto ci = col_span(row_coeffs, i);
        const MultiIndex zero = MultiIndex::zero(model.dim());
        for (long j = 0; j < L; ++j) {
            PointView zj(model.centers_.data() + j * model.centers_.cols(),
                         static_cast<std::size_t>(model.centers_.cols()));
            PairDerivEvaluator pd(kernel, xi, zj);  // derivative in x via symmetry
            double acc = 0.0;
            for (std::size_t t = 0; t < plans.size(); ++t) {
                double term = 0.0;
                for (std::size_t s = 0; s < plans[t].rests.size(); ++s)
                    term += wpart[t][s] * pd.deriv(plans[t].rests[s], zero);
                acc += ci[t] * term;
            }
            block(i, j) = acc;
        }
    }
    return block;
}

void accumulate(LowRankModel& model, const Eigen::MatrixXd& block, const Eigen::MatrixXd& targets) {
    if (block.cols() != model.rank()) throw ShapeError("accumulate: block width != rank");
    if (targets.rows() != block.rows() || targets.cols() != model.n_targets())
        throw ShapeError("accumulate: target shape mismatch");
    if (block.rows() == 0) return;
    // Rank update on the lower triangle, then mirror: keeps the normal matrix
    // exactly symmetric regardless of GEMM blocking.
    model.normal_.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose(), 1.0);
    model.normal_.triangularView<Eigen::StrictlyUpper>() =
        model.normal_.transpose().triangularView<Eigen::StrictlyUpper>();
    model.rhs_.noalias() += block.transpose() * targets;
    if (model.store_design_) {
        const long old = model.design_t_.cols();
        model.design_t_.conservativeResize(model.rank(), old + block.rows());
        model.design_t_.rightCols(block.rows()) = block.transpose();
    }
    model.rows_seen_ += block.rows();
}

void accumulate(LowRankModel& model, const Eigen::MatrixXd& block, const Eigen::VectorXd& y) {
    accumulate(model, block, Eigen::MatrixXd(y));
}

void accumulate_batch(LowRankModel& model, const LabeledSampleSet& batch) {
    if (!batch.values) throw ConfigError("accumulate_batch: batch carries no values");
    if (model.n_targets() != 1)
        throw ShapeError("accumulate_batch: model expects more than one target column");
    accumulate(model, design_block(model, model.op(), model.kernel(), batch),
               Eigen::MatrixXd(*batch.values));
}

void accumulate_from_csv(LowRankModel& model, const std::string& path) {
    accumulate_batch(model, read_csv(path));
}

Eigen::MatrixXd finalize(const LowRankModel& model) {
    if (model.rows_seen() == 0) throw ConfigError("finalize: no batches accumulated");
    Eigen::LDLT<Eigen::MatrixXd> ldlt(model.normal());
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("finalize: factorization of the normal matrix failed (L=" +
                             std::to_string(model.rank()) +
                             ", lambda=" + std::to_string(model.lambda()) + ")");
    if (model.stores_design()) return ldlt.solve(model.design_transposed());
    return ldlt.solve(model.rhs());
}

namespace {

// Basis values at query rows, chunk x L.
Eigen::MatrixXd basis_block(const LowRankModel& model, const PointMatrix& queries) {
    const long q = queries.rows();
    const long L = model.rank();
    Eigen::MatrixXd out(q, L);
#pragma omp parallel for schedule(static)
    for (long r = 0; r < q; ++r) {
        const PointView x(queries.data() + r * queries.cols(),
                          static_cast<std::size_t>(queries.cols()));
        if (model.kind() == BasisKind::Windowed) {
            const double w = model.window().value(x);
            for (long j = 0; j < L; ++j) {
                PointView zj(model.centers().data() + j * model.centers().cols(),
                             static_cast<std::size_t>(model.centers().cols()));
                out(r, j) = w * eval(model.kernel(), zj, x);
            }
        } else {
            for (long j = 0; j < L; ++j) {
                PointView zj(model.centers().data() + j * model.centers().cols(),
                             static_cast<std::size_t>(model.centers().cols()));
                out(r, j) = apply_first(model.op(), model.kernel(), zj,
                                        model.center_tags()[static_cast<std::size_t>(j)], x);
            }
        }
    }
    return out;
}

}  // namespace

Eigen::MatrixXd evaluate_lowrank_many(const LowRankModel& model, const Eigen::MatrixXd& coeffs,
                                      const PointMatrix& queries) {
    if (coeffs.rows() != model.rank())
        throw ShapeError("evaluate_lowrank: coefficient length mismatch");
    if (queries.rows() > 0 && static_cast<int>(queries.cols()) != model.dim())
        throw ShapeError("evaluate_lowrank: query dimension mismatch");
    Eigen::MatrixXd out(queries.rows(), coeffs.cols());
    const long chunk = 4096;
    for (long start = 0; start < queries.rows(); start += chunk) {
        const long rows = std::min(chunk, queries.rows() - start);
        PointMatrix block = queries.middleRows(start, rows);
        out.middleRows(start, rows).noalias() = basis_block(model, block) * coeffs;
    }
    return out;
}

Eigen::VectorXd evaluate_lowrank(const LowRankModel& model, const Eigen::VectorXd& coeffs,
                                 const PointMatrix& queries) {
    return evaluate_lowrank_many(model, Eigen::MatrixXd(coeffs), queries).col(0);
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

void save_checkpoint(const LowRankModel& model, const std::string& path) {
    if (model.stores_design())
        throw ConfigError("save_checkpoint: operator-mode design store is not checkpointable");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("save_checkpoint: cannot open " + path);
    f.write("KOLR", 4);
    put<std::uint32_t>(f, 1);
    const long L = model.rank();
    put<std::uint64_t>(f, static_cast<std::uint64_t>(L));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.dim()));
    put<std::uint8_t>(f, static_cast<std::uint8_t>(model.kind()));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.n_targets()));
    put<double>(f, model.lambda());
    put<std::uint64_t>(f, static_cast<std::uint64_t>(model.batch_size()));
    put<std::uint64_t>(f, static_cast<std::uint64_t>(model.rows_seen()));
    put<double>(f, model.kernel().bandwidth);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.kernel().max_order));
    f.write(reinterpret_cast<const char*>(model.centers().data()),
            static_cast<std::streamsize>(sizeof(double)) * L * model.dim());
    for (long i = 0; i < L; ++i)
        put<std::uint8_t>(f, static_cast<std::uint8_t>(model.center_tags()[static_cast<std::size_t>(i)]));
    f.write(reinterpret_cast<const char*>(model.normal().data()),
            static_cast<std::streamsize>(sizeof(double)) * L * L);
    f.write(reinterpret_cast<const char*>(model.rhs().data()),
            static_cast<std::streamsize>(sizeof(double)) * L * model.n_targets());
    if (!f) throw ConfigError("save_checkpoint: write failed for " + path);
}

LowRankModel load_checkpoint(const std::string& path, const KernelSpec& kernel, PdeOperatorSpec op,
                             DifferentiableFunction window) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("load_checkpoint: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (std::string(magic, 4) != "KOLR") throw ConfigError("load_checkpoint: bad magic");
    if (get<std::uint32_t>(f) != 1) throw ConfigError("load_checkpoint: unsupported version");
    const long L = static_cast<long>(get<std::uint64_t>(f));
    const int d = static_cast<int>(get<std::uint32_t>(f));
    const auto kind = static_cast<BasisKind>(get<std::uint8_t>(f));
    const int n_targets = static_cast<int>(get<std::uint32_t>(f));
    const double lambda = get<double>(f);
    const long batch = static_cast<long>(get<std::uint64_t>(f));
    const long rows_seen = static_cast<long>(get<std::uint64_t>(f));
    const double eta = get<double>(f);
    const int max_order = static_cast<int>(get<std::uint32_t>(f));
    if (d != kernel.dimension || eta != kernel.bandwidth || max_order != kernel.max_order)
        throw ConfigError("load_checkpoint: kernel does not match the stored header");
    if (kind == BasisKind::Windowed && (!window.value || !window.partial))
        throw ConfigError("load_checkpoint: windowed checkpoint requires the window function");

    PointMatrix centers(L, d);
    f.read(reinterpret_cast<char*>(centers.data()),
           static_cast<std::streamsize>(sizeof(double)) * L * d);
    std::vector<RegionTag> tags(static_cast<std::size_t>(L));
    for (long i = 0; i < L; ++i) tags[static_cast<std::size_t>(i)] =
        static_cast<RegionTag>(get<std::uint8_t>(f));

    LowRankModel model(std::move(centers), std::move(tags), kind, std::move(window), kernel,
                       std::move(op), lambda, batch, n_targets, /*store_design=*/false);
    f.read(reinterpret_cast<char*>(model.normal_.data()),
           static_cast<std::streamsize>(sizeof(double)) * L * L);
    f.read(reinterpret_cast<char*>(model.rhs_.data()),
           static_cast<std::streamsize>(sizeof(double)) * L * n_targets);
    if (!f) throw ConfigError("load_checkpoint: truncated file " + path);
    model.rows_seen_ = rows_seen;
    return model;
}

std::pair<PointMatrix, std::vector<RegionTag>> centers_from_samples(const LabeledSampleSet& samples,
                                                                    long count) {
    if (count < 1) throw ConfigError("centers_from_samples: count must be positive");
    PointMatrix centers(count, samples.dim());
    long taken = 0;
    for (long i = 0; i < samples.size() && taken < count; ++i) {
        if (samples.region(i) != RegionTag::Interior) continue;
        centers.row(taken++) = samples.points.row(i);
    }
    if (taken < count)
        throw ConfigError("centers_from_samples: fewer interior samples than requested centers");
    return {std::move(centers),
            std::vector<RegionTag>(static_cast<std::size_t>(count), RegionTag::Interior)};
}

std::pair<PointMatrix, std::vector<RegionTag>> resample_centers(const BoxDomain& domain, long count,
                                                                std::uint64_t seed) {
    LabeledSampleSet s = sample_interior(domain, count, seed);
    return {std::move(s.points), std::move(s.regions)};
}

}  // namespace kernelop
