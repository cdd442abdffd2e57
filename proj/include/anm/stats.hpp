#pragma once

#include <span>
#include <utility>

namespace anm {

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_sd(std::span<const double> v);

/// One-sample Kolmogorov-Smirnov statistic against U(0, 1).
double ks_uniform_statistic(std::span<const double> values);
/// Asymptotic KS p-value (Stephens' small-sample correction).
double ks_uniform_pvalue(std::span<const double> values);

/// Exact (Clopper-Pearson) binomial interval with coverage `level`.
std::pair<double, double> clopper_pearson(long successes, long trials, double level);

}  // namespace anm
