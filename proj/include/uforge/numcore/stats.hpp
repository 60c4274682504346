#pragma once

#include <functional>
#include <span>

namespace uforge::stats {

double mean(std::span<const double> xs);
/// Unbiased sample variance (n - 1 denominator). Needs n >= 2.
double variance(std::span<const double> xs);

/// Average ranks (1-based) with ties sharing the mean rank.
void average_ranks(std::span<const double> xs, std::span<double> ranks);

/// Spearman rank correlation of (xs, ys), Pearson on average ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Spearman correlation of a series against its index 0, 1, 2, ...
double spearman_vs_index(std::span<const double> ys);

/// One-sided sign-test p-value: probability of at least `successes` out of
/// `trials` under Binomial(trials, 1/2).
double sign_test_p(int successes, int trials);

/// Least-squares slope of y against x.
double ols_slope(std::span<const double> xs, std::span<const double> ys);

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F| for a CDF.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
/// Asymptotic p-value of the KS statistic for sample size n.
double ks_p_value(double statistic, std::size_t n);

double normal_cdf(double x, double mean, double sd);

}  // namespace uforge::stats
