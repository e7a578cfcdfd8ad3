// kernelop: physics-informed kernel solution operators for linear Dirichlet
// problems. Subcommands: benchmark, convergence, selfcheck, kernel-check.
//
// Exit codes: 0 success, 2 usage/configuration error, 3 numerical failure,
// 4 self-check failure.

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "kernelop/experiment.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitSelfCheck = 4;

kernelop::ExperimentConfig build_config(const std::string& config_path,
                                        const std::vector<std::string>& sets, long seed,
                                        long threads) {
    kernelop::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = kernelop::ExperimentConfig::from_file(config_path);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw kernelop::ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed >= 0) cfg.set("seed", std::to_string(seed));
    if (threads > 0) cfg.set("threads", std::to_string(threads));
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"physics-informed kernel solution operators for linear Dirichlet problems"};
    app.require_subcommand(1);

    std::string config_path, out_dir, problem;
    std::vector<std::string> sets;
    long seed = -1, threads = 0;
    app.add_option("--config", config_path, "flat key=value config file")->check(CLI::ExistingFile);
    app.add_option("--set", sets, "override a config key (key=value), repeatable");
    app.add_option("--out", out_dir, "output directory for CSV artifacts");
    app.add_option("--seed", seed, "master RNG seed");
    app.add_option("--threads", threads, "worker thread count");

    auto* bench = app.add_subcommand("benchmark", "run one PDE benchmark and report errors");
    bench->add_option("problem", problem, "problem name, e.g. darcy-a1 or helmholtz-20")
        ->required();

    auto* conv = app.add_subcommand("convergence", "low-rank convergence-rate study");
    auto* self = app.add_subcommand("selfcheck", "run the built-in verification suites");
    auto* kcheck = app.add_subcommand("kernel-check", "full kernel-derivative oracle sweep");
    for (auto* sub : {bench, conv, self, kcheck}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        const kernelop::ExperimentConfig cfg = build_config(config_path, sets, seed, threads);
        if (bench->parsed()) {
            kernelop::run_benchmark(problem, cfg, out_dir, std::cout);
            return 0;
        }
        if (conv->parsed()) {
            kernelop::run_convergence(cfg, out_dir, std::cout);
            return 0;
        }
        if (self->parsed()) {
            const bool ok = kernelop::run_selfcheck(std::cout);
            std::cout << (ok ? "selfcheck: all checks passed" : "selfcheck: FAILURES") << "\n";
            return ok ? 0 : kExitSelfCheck;
        }
        if (kcheck->parsed()) {
            const bool ok = kernelop::run_kernel_check(std::cout);
            return ok ? 0 : kExitSelfCheck;
        }
    } catch (const kernelop::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const kernelop::ShapeError& e) {
        std::cerr << "input shape error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const kernelop::CapabilityError& e) {
        std::cerr << "capability error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const kernelop::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
