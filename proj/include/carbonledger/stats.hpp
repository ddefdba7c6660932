#pragma once

#include <span>
#include <vector>

namespace carbonledger::stats {

double mean(std::span<const double> xs);
/// Sample variance, n - 1 denominator. Requires n >= 2.
double sample_variance(std::span<const double> xs);
double sample_sd(std::span<const double> xs);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

/// Standard normal quantile.
double normal_quantile(double p);
/// Student-t quantile with `dof` degrees of freedom.
double student_t_quantile(double p, double dof);

/// Percentiles bounding a one-sigma (68%) band.
inline constexpr double kBandLowerP = 0.16;
inline constexpr double kBandUpperP = 0.84;

/// Normal sigma whose central 68% interval has the given half-width.
double sigma_from_half_width(double half_width);

}  // namespace carbonledger::stats
