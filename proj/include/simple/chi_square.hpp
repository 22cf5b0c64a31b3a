#pragma once

#include <span>

namespace simple {

// Upper tail Q(df/2, x/2) of the chi-square law. x < 0 is treated as 0.
double chi2_sf(double x, int df);
double chi2_cdf(double x, int df);

// Point q with chi2_sf(q, df) = upper_tail.
double chi2_upper_quantile(double upper_tail, int df);

// Kolmogorov-Smirnov distance between the empirical law of `samples` and
// chi-square with df degrees of freedom.
double ks_distance_chi2(std::span<const double> samples, int df);

}  // namespace simple
