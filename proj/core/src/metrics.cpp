#include "kernelop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace kernelop {

void ErrorReport::finalize_means() {
    mean_l2 = 0.0;
    mean_linf = 0.0;
    if (per_function.empty()) return;
    for (const auto& [l2, linf] : per_function) {
        mean_l2 += l2;
        mean_linf += linf;
    }
    mean_l2 /= static_cast<double>(per_function.size());
    mean_linf /= static_cast<double>(per_function.size());
}

std::pair<double, double> relative_errors(const Eigen::VectorXd& pred,
                                          const Eigen::VectorXd& truth) {
    if (pred.size() != truth.size()) throw ShapeError("relative_errors: length mismatch");
    const double t2 = truth.norm();
    const double tinf = truth.lpNorm<Eigen::Infinity>();
    if (t2 == 0.0 || tinf == 0.0)
        throw NumericalError("relative_errors: zero truth norm, metric undefined");
    const Eigen::VectorXd diff = pred - truth;
    return {diff.norm() / t2, diff.lpNorm<Eigen::Infinity>() / tinf};
}

double lambda_schedule(double alpha, double c, long n) {
    if (!(alpha > 0.0) || !(alpha < 0.5))
        throw ConfigError("lambda_schedule: alpha must lie in (0, 1/2)");
    if (!(c > 0.0)) throw ConfigError("lambda_schedule: c must be positive");
    if (n < 1) throw ConfigError("lambda_schedule: n must be positive");
    return c * std::pow(static_cast<double>(n), -alpha);
}

RateFit fit_rate(const std::vector<long>& sample_sizes, const std::vector<double>& mean_errors) {
    if (sample_sizes.size() != mean_errors.size())
        throw ShapeError("fit_rate: size/error length mismatch");
    const std::size_t n = sample_sizes.size();
    if (n < 3) throw ConfigError("fit_rate: need at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sample_sizes[i] < 1 || !(mean_errors[i] > 0.0))
            throw ConfigError("fit_rate: sizes and errors must be positive");
        const double x = std::log(static_cast<double>(sample_sizes[i]));
        const double y = std::log(mean_errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double dn = static_cast<double>(n);
    const double vx = sxx - sx * sx / dn;
    const double vy = syy - sy * sy / dn;
    const double cxy = sxy - sx * sy / dn;
    if (vx == 0.0) throw ConfigError("fit_rate: sample sizes must not be all equal");
    const double slope = cxy / vx;
    RateFit fit;
    fit.beta = -slope;
    fit.intercept = (sy - slope * sx) / dn;
    fit.r_squared = (vy == 0.0) ? 1.0 : (cxy * cxy) / (vx * vy);
    return fit;
}

ConvergenceStudy aggregate_trials(const std::vector<long>& sample_sizes,
                                  const std::vector<std::vector<ErrorReport>>& reports) {
    if (sample_sizes.size() != reports.size())
        throw ShapeError("aggregate_trials: one report list per sample size required");
    ConvergenceStudy study;
    study.sample_sizes = sample_sizes;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& trials : reports) {
        if (trials.empty()) throw ConfigError("aggregate_trials: empty trial list");
        study.trials = std::max<int>(study.trials, static_cast<int>(trials.size()));
        double m2 = 0, mi = 0, mw = 0;
        for (const auto& r : trials) {
            m2 += r.mean_l2;
            mi += r.mean_linf;
            mw += r.wall_time_seconds;
        }
        const double t = static_cast<double>(trials.size());
        m2 /= t;
        mi /= t;
        mw /= t;
        double s2 = 0, si = 0;
        for (const auto& r : trials) {
            s2 += (r.mean_l2 - m2) * (r.mean_l2 - m2);
            si += (r.mean_linf - mi) * (r.mean_linf - mi);
        }
        study.mean_l2.push_back(m2);
        study.mean_linf.push_back(mi);
        study.mean_wall.push_back(mw);
        if (trials.size() > 1) {
            study.se_l2.push_back(std::sqrt(s2 / (t - 1.0)) / std::sqrt(t));
            study.se_linf.push_back(std::sqrt(si / (t - 1.0)) / std::sqrt(t));
        } else {
            study.se_l2.push_back(nan);
            study.se_linf.push_back(nan);
        }
    }
    if (sample_sizes.size() >= 3) {
        study.slope_l2 = fit_rate(sample_sizes, study.mean_l2);
        study.slope_linf = fit_rate(sample_sizes, study.mean_linf);
    }
    return study;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, const char* who) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError(std::string(who) + ": cannot open " + path);
    return f;
}

}  // namespace

void write_errors_csv(const ErrorReport& report, const std::string& path) {
    auto f = open_out(path, "write_errors_csv");
    f << "k,rel_l2,rel_linf\n";
    for (std::size_t k = 0; k < report.per_function.size(); ++k)
        f << k << "," << fmt(report.per_function[k].first) << ","
          << fmt(report.per_function[k].second) << "\n";
}

void write_report_summary_csv(const ErrorReport& report, const std::string& path) {
    auto f = open_out(path, "write_report_summary_csv");
    f << "mean_l2,mean_linf,wall_time_seconds\n";
    f << fmt(report.mean_l2) << "," << fmt(report.mean_linf) << ","
      << fmt(report.wall_time_seconds) << "\n";
}

void write_trials_csv(const std::vector<long>& sample_sizes,
                      const std::vector<std::vector<ErrorReport>>& reports,
                      const std::string& path) {
    auto f = open_out(path, "write_trials_csv");
    f << "N,trial,rel_l2,rel_linf,wall_time\n";
    for (std::size_t n = 0; n < sample_sizes.size(); ++n)
        for (std::size_t t = 0; t < reports[n].size(); ++t)
            f << sample_sizes[n] << "," << t << "," << fmt(reports[n][t].mean_l2) << ","
              << fmt(reports[n][t].mean_linf) << "," << fmt(reports[n][t].wall_time_seconds)
              << "\n";
}

void write_study_summary_csv(const ConvergenceStudy& study, const std::string& path) {
    auto f = open_out(path, "write_study_summary_csv");
    f << "N,mean_l2,se_l2,mean_linf,se_linf\n";
    for (std::size_t i = 0; i < study.sample_sizes.size(); ++i) {
        f << study.sample_sizes[i] << "," << fmt(study.mean_l2[i]) << ",";
        if (!std::isnan(study.se_l2[i])) f << fmt(study.se_l2[i]);
        f << "," << fmt(study.mean_linf[i]) << ",";
        if (!std::isnan(study.se_linf[i])) f << fmt(study.se_linf[i]);
        f << "\n";
    }
}

void write_slopes_json(const ConvergenceStudy& study, const std::string& path) {
    auto f = open_out(path, "write_slopes_json");
    f << "{\"beta_l2\":" << fmt(study.slope_l2.beta) << ",\"r2_l2\":"
      << fmt(study.slope_l2.r_squared) << ",\"beta_linf\":" << fmt(study.slope_linf.beta)
      << ",\"r2_linf\":" << fmt(study.slope_linf.r_squared) << "}\n";
}

}  // namespace kernelop
