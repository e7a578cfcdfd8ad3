#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "kernelop/lowrank.hpp"
#include "kernelop/metrics.hpp"
#include "kernelop/problems.hpp"

namespace kernelop {

/// Flat key=value experiment configuration. Keys not set explicitly fall back
/// to the problem's defaults at resolution time; the resolved map is echoed
/// verbatim (sorted) into resolved-config.txt so any run can be reproduced
/// from its output directory.
///
/// Recognized keys: problem, n_interior, n_boundary, n_initial, eta, lambda,
/// lambda_alpha, lambda_c, family_size, seed, trials, sizes, centers, batch,
/// basis, center_mode, center_seed, threads, planted_beta.
class ExperimentConfig {
public:
    ExperimentConfig() = default;

    /// Lines of key=value; '#' starts a comment, blank lines ignored.
    static ExperimentConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    void unset(const std::string& key);
    bool has(const std::string& key) const;

    std::string get_str(const std::string& key, const std::string& fallback) const;
    long get_long(const std::string& key, long fallback) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::vector<long> get_sizes(const std::string& key, std::vector<long> fallback) const;

    /// Fills unset sampling/kernel keys from the problem's defaults.
    void resolve_with(const PdeProblem& problem);

    void echo(const std::string& path) const;
    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

/// Samples per config, fits the dense solver (or the low-rank model when
/// `basis` is operator/windowed), evaluates the whole test family and writes
/// errors.csv + summary.csv (+ resolved-config.txt) under out_dir when it is
/// non-empty. Wall time covers Gram/design assembly, factorization and family
/// evaluation.
ErrorReport run_benchmark(const std::string& problem_name, ExperimentConfig config,
                          const std::string& out_dir, std::ostream& log);

/// Low-rank convergence study over config `sizes` x `trials` with fixed or
/// scheduled lambda; writes errors.csv (per trial), summary.csv (per N) and
/// slopes.json. `planted_beta`, when set, injects error = N^-beta instead of
/// computing, as a harness self-test.
ConvergenceStudy run_convergence(ExperimentConfig config, const std::string& out_dir,
                                 std::ostream& log);

/// Kernel finite-difference suite, Gram PSD suite, plain-ridge reduction
/// check and low-rank/dense agreement check; prints one line per check.
bool run_selfcheck(std::ostream& log);

/// The kernel-derivative finite-difference sweep alone, at full width.
bool run_kernel_check(std::ostream& log);

}  // namespace kernelop
