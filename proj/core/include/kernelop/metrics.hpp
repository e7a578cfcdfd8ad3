#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kernelop/errors.hpp"

namespace kernelop {

/// Per-family error summary of one experiment run.
struct ErrorReport {
    std::vector<std::pair<double, double>> per_function;  ///< (rel_l2, rel_linf)
    double mean_l2 = 0.0;
    double mean_linf = 0.0;
    double wall_time_seconds = 0.0;  ///< fit + evaluation

    void finalize_means();
};

/// (|pred-truth|_2 / |truth|_2, |pred-truth|_inf / |truth|_inf) in the
/// discrete grid norms. Throws NumericalError on a zero truth norm.
std::pair<double, double> relative_errors(const Eigen::VectorXd& pred,
                                          const Eigen::VectorXd& truth);

/// lambda(N) = c * N^(-alpha), alpha restricted to (0, 1/2).
double lambda_schedule(double alpha, double c, long n);

struct RateFit {
    double beta = 0.0;       ///< decay exponent, sign-flipped OLS slope
    double intercept = 0.0;  ///< log-space intercept
    double r_squared = 0.0;
};

/// OLS of log(error) on log(N); needs >= 3 positive points.
RateFit fit_rate(const std::vector<long>& sample_sizes, const std::vector<double>& mean_errors);

/// Aggregated convergence study: per-N means and standard errors across
/// trials, slopes fitted on the per-N means. A standard error is absent
/// (quiet NaN, empty CSV field) when only one trial ran.
struct ConvergenceStudy {
    std::vector<long> sample_sizes;
    int trials = 0;
    std::vector<double> mean_l2, se_l2, mean_linf, se_linf, mean_wall;
    RateFit slope_l2, slope_linf;
    std::optional<std::pair<double, double>> schedule;  ///< (alpha, c) when adaptive
    std::optional<double> fixed_lambda;
};

/// reports[n][t] is the report of trial t at sample_sizes[n].
ConvergenceStudy aggregate_trials(const std::vector<long>& sample_sizes,
                                  const std::vector<std::vector<ErrorReport>>& reports);

// CSV / JSON artifacts ('.' decimal separator, LF endings, header rows).

/// Per-member errors of one run: columns k, rel_l2, rel_linf.
void write_errors_csv(const ErrorReport& report, const std::string& path);

/// One-line run summary: mean_l2, mean_linf, wall_time_seconds.
void write_report_summary_csv(const ErrorReport& report, const std::string& path);

/// Per-trial rows: N, trial, rel_l2, rel_linf, wall_time.
void write_trials_csv(const std::vector<long>& sample_sizes,
                      const std::vector<std::vector<ErrorReport>>& reports,
                      const std::string& path);

/// Per-N summary: N, mean_l2, se_l2, mean_linf, se_linf.
void write_study_summary_csv(const ConvergenceStudy& study, const std::string& path);

/// One-line JSON with the fitted slopes.
void write_slopes_json(const ConvergenceStudy& study, const std::string& path);

}  // namespace kernelop
