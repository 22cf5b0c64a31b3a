#include "simple/chi_square.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "simple/errors.hpp"

namespace simple {

namespace {

void check_df(int df) {
  if (df < 1) throw UsageError("chi-square degrees of freedom must be positive");
}

}  // namespace

double chi2_sf(double x, int df) {
  check_df(df);
  if (std::isnan(x)) return x;
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chi2_cdf(double x, int df) {
  check_df(df);
  if (std::isnan(x)) return x;
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * df, 0.5 * x);
}

double chi2_upper_quantile(double upper_tail, int df) {
  check_df(df);
  if (!(upper_tail > 0.0 && upper_tail <= 1.0)) throw UsageError("tail probability must lie in (0, 1]");
  if (upper_tail == 1.0) return 0.0;
  return 2.0 * boost::math::gamma_q_inv(0.5 * df, upper_tail);
}

double ks_distance_chi2(std::span<const double> samples, int df) {
  if (samples.empty()) throw UsageError("KS distance needs at least one sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t r = 0; r < sorted.size(); ++r) {
    const double f = chi2_cdf(sorted[r], df);
    d = std::max({d, (static_cast<double>(r) + 1.0) / m - f, f - static_cast<double>(r) / m});
  }
  return d;
}

}  // namespace simple
