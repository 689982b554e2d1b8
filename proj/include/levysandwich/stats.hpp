#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace levy::stats {

/// Outcome of one statistical check. When `vacuous` is set the check could
/// not be carried out meaningfully and `passed` carries no information.
struct TestReport {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    std::size_t n_samples = 0;
    bool passed = false;
    bool vacuous = false;
    std::string notes;
};

/// Asymptotic Kolmogorov critical value c(level) = sqrt(-ln(level / 2) / 2);
/// c(0.01) ~ 1.628.
double kolmogorov_critical(double level);

/// sup_x |F_a(x) - F_b(x)| for two empirical CDFs.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// Two-sample KS test against c(level) sqrt((n + m) / (n m)), plus `allowance`
/// added to the threshold (used to budget for grid bias). Throws
/// std::invalid_argument on an empty sample.
TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double level = 0.01,
                         double allowance = 0.0);

/// One-sample KS test against a continuous CDF.
TestReport ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf, double level = 0.01,
                         double allowance = 0.0);

/// Two-sample 2-D KS (Fasano-Franceschini statistic with the Press et al.
/// significance approximation). O(n (n + m)).
TestReport ks2d_two_sample(std::span<const std::pair<double, double>> a,
                           std::span<const std::pair<double, double>> b, double level = 0.01);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

/// |Pearson| and |Spearman| both below multiplier / sqrt(n). Vacuous when a
/// margin is constant; statistic is the larger of the two coefficients.
TestReport correlation_bound(std::span<const double> x, std::span<const double> y, double multiplier = 3.0);

struct Proportion {
    double estimate;
    double halfwidth;
    bool boundary;  ///< 0 or n successes: the normal interval degenerates
};
Proportion proportion_ci(std::size_t successes, std::size_t n, double z = 3.0);

struct MeanEstimate {
    double mean;
    double stderr_;
};
MeanEstimate mean_with_stderr(std::span<const double> values);

}  // namespace levy::stats
