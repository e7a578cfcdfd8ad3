#include "kernelop/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kernelop/finite_difference.hpp"

namespace kernelop {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key=value, got '" + line + "'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key.empty()) throw ConfigError("config: empty key");
    kv_[key] = value;
}

void ExperimentConfig::unset(const std::string& key) { kv_.erase(key); }

bool ExperimentConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string ExperimentConfig::get_str(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

long ExperimentConfig::get_long(const std::string& key, long fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        return std::stol(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not an integer: " + it->second);
    }
}

std::uint64_t ExperimentConfig::get_seed(const std::string& key, std::uint64_t fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not a seed: " + it->second);
    }
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
    }
}

std::vector<long> ExperimentConfig::get_sizes(const std::string& key,
                                              std::vector<long> fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<long> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        out.push_back(std::stol(tok));
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' holds no sizes");
    return out;
}

void ExperimentConfig::resolve_with(const PdeProblem& problem) {
    auto fill = [this](const std::string& k, const std::string& v) {
        if (!has(k)) kv_[k] = v;
    };
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    fill("problem", problem.name);
    fill("n_interior", std::to_string(problem.defaults.n_interior));
    fill("n_boundary", std::to_string(problem.defaults.n_boundary));
    fill("n_initial", std::to_string(problem.defaults.n_initial));
    fill("eta", num(problem.defaults.eta));
    fill("lambda", num(problem.defaults.lambda));
    fill("family_size", std::to_string(problem.defaults.family_size));
    fill("seed", "42");
    fill("basis", problem.defaults.basis);
    if (problem.defaults.centers > 0) fill("centers", std::to_string(problem.defaults.centers));
    if (problem.defaults.batch > 0) fill("batch", std::to_string(problem.defaults.batch));
}

void ExperimentConfig::echo(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("config: cannot write " + path);
    for (const auto& [k, v] : kv_) f << k << "=" << v << "\n";
}

namespace {

void apply_threads(const ExperimentConfig& cfg) {
    const long threads = cfg.get_long("threads", 0);
    if (threads > 0) {
#ifdef _OPENMP
        omp_set_num_threads(static_cast<int>(threads));
#endif
        Eigen::setNbThreads(static_cast<int>(threads));
    }
}

std::vector<DifferentiableFunction> make_family(const PdeProblem& problem, int m,
                                                std::uint64_t seed) {
    std::vector<DifferentiableFunction> members;
    members.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) members.push_back(problem.family.generator(k, seed));
    return members;
}

LabeledSampleSet slice_rows(const LabeledSampleSet& set, long start, long count) {
    LabeledSampleSet out;
    out.points = set.points.middleRows(start, count);
    out.regions.assign(set.regions.begin() + start, set.regions.begin() + start + count);
    if (set.values) out.values = set.values->segment(start, count);
    out.seed = set.seed;
    return out;
}

ErrorReport score_predictions(const Eigen::MatrixXd& predictions,
                              const std::vector<DifferentiableFunction>& members,
                              const PointMatrix& grid) {
    ErrorReport report;
    for (std::size_t k = 0; k < members.size(); ++k) {
        const Eigen::VectorXd truth = values_on_grid(members[k], grid);
        report.per_function.push_back(relative_errors(predictions.col(static_cast<long>(k)), truth));
    }
    report.finalize_means();
    return report;
}

ErrorReport benchmark_dense(const PdeProblem& problem, const ExperimentConfig& cfg,
                            std::ostream& log) {
    const std::uint64_t seed = cfg.get_seed("seed", 42);
    const int m = static_cast<int>(cfg.get_long("family_size", problem.defaults.family_size));
    const double eta = cfg.get_double("eta", problem.defaults.eta);
    KernelSpec kernel(eta, problem.op.dimension());
    const LabeledSampleSet samples =
        sample_problem(problem.domain, cfg.get_long("n_interior", problem.defaults.n_interior),
                       cfg.get_long("n_boundary", problem.defaults.n_boundary),
                       cfg.get_long("n_initial", problem.defaults.n_initial), seed);
    const std::vector<DifferentiableFunction> members = make_family(problem, m, seed);
    const PointMatrix grid = evaluation_grid(problem, seed);

    const auto t0 = std::chrono::steady_clock::now();
    const GeneralizedGram gram = assemble_gram(kernel, problem.op, samples);
    SolverConfig solver_cfg{cfg.get_double("lambda", problem.defaults.lambda)};
    const SolutionOperator solop = fit(gram, samples, solver_cfg, kernel, problem.op);
    if (solop.jitter() > 0.0) log << "  note: jitter " << solop.jitter() << " applied\n";

    ErrorReport report;
    if (m > 0) {
        Eigen::MatrixXd targets(samples.size(), m);
        for (int k = 0; k < m; ++k)
            targets.col(k) = forcing_from_solution(problem, members[static_cast<std::size_t>(k)],
                                                   samples);
        const Eigen::MatrixXd coeffs = solop.apply_many(targets);
        const Eigen::MatrixXd predictions = solop.evaluate_many(coeffs, grid);
        report = score_predictions(predictions, members, grid);
    }
    report.wall_time_seconds = seconds_since(t0);
    return report;
}

ErrorReport benchmark_lowrank(const PdeProblem& problem, const ExperimentConfig& cfg,
                              std::ostream& log) {
    const std::uint64_t seed = cfg.get_seed("seed", 42);
    const int m = static_cast<int>(cfg.get_long("family_size", problem.defaults.family_size));
    if (m < 1) throw ConfigError("low-rank benchmark: family_size must be positive");
    const double eta = cfg.get_double("eta", problem.defaults.eta);
    const long centers_n = cfg.get_long("centers", problem.defaults.centers);
    const long batch = cfg.get_long("batch", problem.defaults.batch);
    if (centers_n < 1 || batch < 1)
        throw ConfigError("low-rank benchmark: centers and batch must be positive");
    const std::string basis = cfg.get_str("basis", problem.defaults.basis);

    KernelSpec kernel(eta, problem.op.dimension());
    const LabeledSampleSet samples =
        sample_problem(problem.domain, cfg.get_long("n_interior", problem.defaults.n_interior),
                       cfg.get_long("n_boundary", problem.defaults.n_boundary),
                       cfg.get_long("n_initial", problem.defaults.n_initial), seed);
    const std::vector<DifferentiableFunction> members = make_family(problem, m, seed);
    const PointMatrix grid = evaluation_grid(problem, seed);

    const auto t0 = std::chrono::steady_clock::now();
    auto [centers, tags] =
        cfg.get_str("center_mode", "first") == "resample"
            ? resample_centers(problem.domain, centers_n,
                               static_cast<std::uint64_t>(cfg.get_long("center_seed", 7)))
            : centers_from_samples(samples, centers_n);
    const double lambda = cfg.get_double("lambda", problem.defaults.lambda);
    LowRankModel model =
        basis == "windowed"
            ? LowRankModel::windowed(std::move(centers), tensor_window(problem.op.dimension()),
                                     problem.domain, kernel, problem.op, lambda, batch, m)
            : LowRankModel::operator_applied(std::move(centers), std::move(tags), kernel,
                                             problem.op, lambda, batch, m);

    for (long start = 0; start < samples.size(); start += batch) {
        const long rows = std::min(batch, samples.size() - start);
        const LabeledSampleSet block_rows = slice_rows(samples, start, rows);
        Eigen::MatrixXd targets(rows, m);
        for (int k = 0; k < m; ++k)
            targets.col(k) = forcing_from_solution(problem, members[static_cast<std::size_t>(k)],
                                                   block_rows);
        accumulate(model, design_block(model, problem.op, kernel, block_rows), targets);
    }
    const Eigen::MatrixXd coeffs = finalize(model);
    const Eigen::MatrixXd predictions = evaluate_lowrank_many(model, coeffs, grid);
    ErrorReport report = score_predictions(predictions, members, grid);
    report.wall_time_seconds = seconds_since(t0);
    (void)log;
    return report;
}

}  // namespace

ErrorReport run_benchmark(const std::string& problem_name, ExperimentConfig config,
                          const std::string& out_dir, std::ostream& log) {
    const PdeProblem problem = problem_by_name(problem_name);
    config.set("problem", problem.name);
    config.resolve_with(problem);
    apply_threads(config);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        config.echo(out_dir + "/resolved-config.txt");
    }

    const std::string basis = config.get_str("basis", problem.defaults.basis);
    const bool lowrank = basis == "operator" || basis == "windowed" || config.has("centers");
    const ErrorReport report = lowrank ? benchmark_lowrank(problem, config, log)
                                       : benchmark_dense(problem, config, log);

    const long n = config.get_long("n_interior", 0) + config.get_long("n_boundary", 0) +
                   config.get_long("n_initial", 0);
    log << problem.name << "  N=" << n << "  eta=" << config.get_str("eta", "?")
        << "  lambda=" << config.get_str("lambda", "?")
        << "  M=" << config.get_str("family_size", "?") << "\n";
    char line[160];
    std::snprintf(line, sizeof line,
                  "  rel L2 %.3e   rel Linf %.3e   wall %.3f s (assembly+fit+evaluate)",
                  report.mean_l2, report.mean_linf, report.wall_time_seconds);
    log << line << "\n";

    if (!out_dir.empty()) {
        write_errors_csv(report, out_dir + "/errors.csv");
        write_report_summary_csv(report, out_dir + "/summary.csv");
    }
    return report;
}

ConvergenceStudy run_convergence(ExperimentConfig config, const std::string& out_dir,
                                 std::ostream& log) {
    const PdeProblem problem = problem_by_name(config.get_str("problem", "poisson3d"));
    config.set("problem", problem.name);
    const bool fixed_lambda = config.has("lambda");  // before defaults fill it
    config.resolve_with(problem);
    if (!fixed_lambda) config.unset("lambda");
    // Desk-scale study defaults; the problem's own defaults keep the
    // larger-run values for explicit benchmark use.
    if (!config.has("sizes")) config.set("sizes", "10000,20000,40000,80000");
    if (!config.has("trials")) config.set("trials", "5");
    if (!config.has("centers") || problem.defaults.centers == config.get_long("centers", 0))
        config.set("centers", "1500");
    if (!config.has("batch")) config.set("batch", "2000");
    const double alpha = config.get_double("lambda_alpha", 0.4);
    const double c = config.get_double("lambda_c", 1e-7);
    if (!fixed_lambda) {
        config.set("lambda_alpha", format_double(alpha));
        config.set("lambda_c", format_double(c));
    }
    apply_threads(config);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        config.echo(out_dir + "/resolved-config.txt");
    }

    const std::vector<long> sizes = config.get_sizes("sizes", {});
    const int trials = static_cast<int>(config.get_long("trials", 5));
    if (trials < 1) throw ConfigError("convergence: trials must be >= 1");
    const std::uint64_t master = config.get_seed("seed", 42);
    const double planted = config.get_double("planted_beta", 0.0);

    std::vector<std::vector<ErrorReport>> reports;
    for (std::size_t ni = 0; ni < sizes.size(); ++ni) {
        const long n = sizes[ni];
        std::vector<ErrorReport> per_trial;
        for (int t = 0; t < trials; ++t) {
            if (planted > 0.0) {
                ErrorReport r;
                const double e = std::pow(static_cast<double>(n), -planted);
                r.per_function.push_back({e, e});
                r.finalize_means();
                per_trial.push_back(std::move(r));
                continue;
            }
            ExperimentConfig run = config;
            run.set("n_interior", std::to_string(n));
            run.set("n_boundary", "0");
            run.set("n_initial", "0");
            run.set("seed", std::to_string(derive_seed(master, ni * 1000 + static_cast<std::size_t>(t))));
            const double lambda =
                fixed_lambda ? config.get_double("lambda", 0.0) : lambda_schedule(alpha, c, n);
            run.set("lambda", format_double(lambda));
            per_trial.push_back(benchmark_lowrank(problem, run, log));
            char line[160];
            std::snprintf(line, sizeof line,
                          "  N=%-7ld trial=%d  lambda=%.3e  rel L2 %.4e  wall %.1f s", n, t,
                          lambda, per_trial.back().mean_l2,
                          per_trial.back().wall_time_seconds);
            log << line << "\n";
        }
        reports.push_back(std::move(per_trial));
    }

    ConvergenceStudy study = aggregate_trials(sizes, reports);
    if (fixed_lambda) study.fixed_lambda = config.get_double("lambda", 0.0);
    else study.schedule = std::make_pair(alpha, c);

    char line[120];
    std::snprintf(line, sizeof line, "fitted slopes: beta_l2=%.3f (r2=%.3f)  beta_linf=%.3f (r2=%.3f)",
                  study.slope_l2.beta, study.slope_l2.r_squared, study.slope_linf.beta,
                  study.slope_linf.r_squared);
    log << line << "\n";

    if (!out_dir.empty()) {
        write_trials_csv(sizes, reports, out_dir + "/errors.csv");
        write_study_summary_csv(study, out_dir + "/summary.csv");
        write_slopes_json(study, out_dir + "/slopes.json");
    }
    return study;
}

namespace {

bool check_kernel_fd(std::ostream& log, const std::vector<int>& dims,
                     const std::vector<double>& etas, int pairs_per_config) {
    long checked = 0, failed = 0;
    for (const int d : dims) {
        // All (alpha, beta) with |alpha| + |beta| <= 4 via an odometer over
        // the stacked 2d exponents.
        std::vector<std::pair<MultiIndex, MultiIndex>> combos;
        std::vector<int> stacked(static_cast<std::size_t>(2 * d), 0);
        while (true) {
            int total = 0;
            for (const int e : stacked) total += e;
            if (total <= 4) {
                MultiIndex a(d), b(d);
                for (int i = 0; i < d; ++i) {
                    a.set(i, stacked[static_cast<std::size_t>(i)]);
                    b.set(i, stacked[static_cast<std::size_t>(d + i)]);
                }
                combos.push_back({a, b});
            }
            int axis = 0;
            for (; axis < 2 * d; ++axis) {
                if (stacked[static_cast<std::size_t>(axis)] < 4) {
                    ++stacked[static_cast<std::size_t>(axis)];
                    break;
                }
                stacked[static_cast<std::size_t>(axis)] = 0;
            }
            if (axis == 2 * d) break;
        }

        for (const double eta : etas) {
            KernelSpec spec(eta, d, 4);
            Xoshiro256pp rng(derive_seed(0xFD, static_cast<std::uint64_t>(d * 1000) +
                                                   static_cast<std::uint64_t>(eta * 1e6)));
            for (const auto& [a, b] : combos) {
                for (int rep = 0; rep < pairs_per_config; ++rep) {
                    std::vector<double> x(static_cast<std::size_t>(d)),
                        y(static_cast<std::size_t>(d));
                    for (int i = 0; i < d; ++i) {
                        x[static_cast<std::size_t>(i)] = rng.uniform01();
                        y[static_cast<std::size_t>(i)] =
                            x[static_cast<std::size_t>(i)] + eta * (3.0 * rng.uniform01() - 1.5);
                    }
                    const double analytic = deriv(spec, a, b, x, y);
                    const double reference = fd::mixed_deriv(a, b, x, y, eta);
                    ++checked;
                    if (!fd::matches_reference(analytic, reference)) {
                        ++failed;
                        if (failed <= 5)
                            log << "    mismatch d=" << d << " eta=" << eta << " alpha="
                                << a.to_string() << " beta=" << b.to_string() << " analytic="
                                << analytic << " fd=" << reference << "\n";
                    }
                }
            }
        }
    }
    log << "  kernel finite-difference sweep: " << checked << " comparisons, " << failed
        << " failures\n";
    return failed == 0;
}

bool check_gram_psd(std::ostream& log) {
    const std::vector<std::string> names = {"darcy-a2", "helmholtz-20", "heat"};
    bool ok = true;
    int config_id = 0;
    for (const auto& name : names) {
        const PdeProblem problem = problem_by_name(name);
        for (int rep = 0; rep < 3; ++rep, ++config_id) {
            const std::uint64_t seed = derive_seed(0x65D, static_cast<std::uint64_t>(config_id));
            const long n_int = 40 + 20 * rep;
            const LabeledSampleSet samples = sample_problem(
                problem.domain, n_int, 20, problem.defaults.n_initial > 0 ? 15 : 0, seed);
            KernelSpec kernel(problem.defaults.eta, problem.op.dimension());
            const GeneralizedGram gram = assemble_gram(kernel, problem.op, samples);
            const double norm2 =
                gram.matrix.selfadjointView<Eigen::Lower>().eigenvalues().cwiseAbs().maxCoeff();
            const double min_eig =
                gram.matrix.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
            const double asym = (gram.matrix - gram.matrix.transpose()).cwiseAbs().maxCoeff();
            if (min_eig < -1e-8 * norm2 || asym > 1e-10 * gram.matrix.cwiseAbs().maxCoeff()) {
                ok = false;
                log << "    PSD violation for " << name << ": min_eig=" << min_eig
                    << " |G|=" << norm2 << " asym=" << asym << "\n";
            }
        }
    }
    return ok;
}

bool check_ridge_reduction(std::ostream& log) {
    for (int rep = 0; rep < 3; ++rep) {
        const int d = 1 + rep % 2;
        const BoxDomain box = BoxDomain::unit_cube(d);
        const LabeledSampleSet samples =
            sample_problem(box, 60, 10, 0, derive_seed(0x22D, static_cast<std::uint64_t>(rep)));
        KernelSpec kernel(0.4, d);
        const PdeOperatorSpec identity = PdeOperatorSpec::identity(d);
        const GeneralizedGram gram = assemble_gram(kernel, identity, samples);
        // Moderate lambda keeps the system conditioning well below 1e12 so
        // the two independent solves can agree at the 1e-12 contract.
        const double lambda = 5e-3;
        const SolutionOperator solop = fit(gram, samples, {lambda}, kernel, identity);
        Xoshiro256pp rng(derive_seed(0x22E, static_cast<std::uint64_t>(rep)));
        Eigen::VectorXd y(samples.size());
        for (long i = 0; i < samples.size(); ++i) y[i] = rng.normal();
        const Eigen::VectorXd via_pipeline = solop.apply(y);
        Eigen::MatrixXd system = gram.matrix;
        system.diagonal().array() += lambda * static_cast<double>(samples.size());
        const Eigen::VectorXd direct = Eigen::FullPivLU<Eigen::MatrixXd>(system).solve(y);
        const double rel = (via_pipeline - direct).norm() / direct.norm();
        if (rel > 1e-12) {
            log << "    ridge reduction mismatch: rel=" << rel << "\n";
            return false;
        }
    }
    return true;
}

bool check_lowrank_dense_agreement(std::ostream& log) {
    const PdeProblem problem = problem_by_name("helmholtz-20");
    // Identity-free small configuration with centers = samples.
    const int n_interior = 58;
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(1), up = Eigen::VectorXd::Ones(1);
    PointMatrix pts(n_interior + 2, 1);
    std::vector<RegionTag> tags;
    for (int i = 0; i < n_interior; ++i) {
        pts(i, 0) = (static_cast<double>(i) + 0.5) / n_interior;
        tags.push_back(RegionTag::Interior);
    }
    pts(n_interior, 0) = 0.0;
    pts(n_interior + 1, 0) = 1.0;
    tags.push_back(RegionTag::Boundary);
    tags.push_back(RegionTag::Boundary);
    LabeledSampleSet samples;
    samples.points = pts;
    samples.regions = tags;

    std::vector<OperatorTerm> terms;
    terms.push_back({[](PointView) { return -1.0; }, {2}});
    PdeOperatorSpec op(1, std::move(terms));
    KernelSpec kernel(0.03, 1);
    const auto member = problem.family.generator(0, 9);
    Eigen::VectorXd y(samples.size());
    for (long i = 0; i < samples.size(); ++i)
        y[i] = apply_to_function(op, member, samples.point(i), samples.region(i));

    const double lambda = 1e-12;
    const GeneralizedGram gram = assemble_gram(kernel, op, samples);
    const SolutionOperator dense = fit(gram, samples, {lambda}, kernel, op);
    const Eigen::VectorXd dense_coeffs = dense.apply(y);

    LowRankModel model = LowRankModel::operator_applied(samples.points, samples.regions, kernel,
                                                        op, lambda, 32);
    for (long start = 0; start < samples.size(); start += 32) {
        const long rows = std::min<long>(32, samples.size() - start);
        LabeledSampleSet batch;
        batch.points = samples.points.middleRows(start, rows);
        batch.regions.assign(samples.regions.begin() + start,
                             samples.regions.begin() + start + rows);
        accumulate(model, design_block(model, op, kernel, batch),
                   Eigen::MatrixXd(y.segment(start, rows)));
    }
    const Eigen::VectorXd lr_coeffs = finalize(model).col(0);

    const Eigen::VectorXd r_dense = gram.matrix * dense_coeffs - y;
    const Eigen::VectorXd r_lr = gram.matrix * lr_coeffs - y;
    if (r_dense.norm() > 1e-6 * y.norm() || r_lr.norm() > 1e-6 * y.norm()) {
        log << "    residuals too large: dense=" << r_dense.norm() / y.norm()
            << " lowrank=" << r_lr.norm() / y.norm() << "\n";
        return false;
    }
    PointMatrix grid(101, 1);
    for (int i = 0; i < 101; ++i) grid(i, 0) = i / 100.0;
    const Eigen::VectorXd pd = dense.evaluate(dense_coeffs, grid);
    const Eigen::VectorXd pl = evaluate_lowrank(model, lr_coeffs, grid);
    const double rel = (pd - pl).norm() / pd.norm();
    if (rel > 1e-4) {
        log << "    dense/low-rank prediction mismatch: rel=" << rel << "\n";
        return false;
    }
    return true;
}

bool report_check(std::ostream& log, const char* name, bool ok) {
    log << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    return ok;
}

}  // namespace

bool run_selfcheck(std::ostream& log) {
    bool all = true;
    all &= report_check(log, "kernel derivatives vs finite differences",
                        check_kernel_fd(log, {1, 2}, {0.1, 1.0}, 20));
    all &= report_check(log, "generalized Gram symmetry and PSD", check_gram_psd(log));
    all &= report_check(log, "order-zero reduction to plain kernel ridge",
                        check_ridge_reduction(log));
    all &= report_check(log, "low-rank / dense solver agreement",
                        check_lowrank_dense_agreement(log));
    return all;
}

bool run_kernel_check(std::ostream& log) {
    return report_check(log, "kernel derivatives vs finite differences (full sweep)",
                        check_kernel_fd(log, {1, 2, 3}, {0.05, 0.1, 1.0}, 100));
}

}  // namespace kernelop
