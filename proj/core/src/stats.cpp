#include "pinflip/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "pinflip/errors.hpp"

namespace pinflip {

double kolmogorov_pvalue(double D, std::size_t n) {
  if (n == 0) throw ArgumentError("empty sample");
  const double rn = std::sqrt(static_cast<double>(n));
  const double x = (rn + 0.12 + 0.11 / rn) * D;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_exponential(std::span<const double> samples, double rate) {
  if (samples.empty()) throw ArgumentError("empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double F = -std::expm1(-rate * s[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

ExponentialFit exponential_fit(std::span<const double> times, const std::vector<bool>& censored) {
  if (censored.size() != times.size()) throw ArgumentError("censoring flags do not match the sample");
  ExponentialFit fit;
  fit.n = times.size();
  double exposure = 0.0;
  std::vector<double> complete;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw ArgumentError("times must be finite and >= 0");
    exposure += times[i];
    if (censored[i]) {
      ++fit.censored;
    } else {
      complete.push_back(times[i]);
    }
  }
  if (complete.size() < 2) throw EstimationError("fewer than two uncensored observations");
  if (!(exposure > 0.0)) throw EstimationError("zero total exposure");
  const double d = static_cast<double>(complete.size());
  fit.rate = d / exposure;
  fit.mean = 1.0 / fit.rate;
  // 2 * exposure * rate ~ chi^2(2d) for type-II censoring; used as the interval here.
  const boost::math::chi_squared chi(2.0 * d);
  fit.ci_low = boost::math::quantile(chi, 0.025) / (2.0 * exposure);
  fit.ci_high = boost::math::quantile(chi, 0.975) / (2.0 * exposure);
  fit.ks = ks_exponential(complete, fit.rate);
  fit.ks_pvalue = kolmogorov_pvalue(fit.ks, complete.size());
  return fit;
}

ExponentialFit exponential_fit(std::span<const double> times) {
  return exponential_fit(times, std::vector<bool>(times.size(), false));
}

ChiSquareTest chi_square_test(std::span<const double> observed, std::span<const double> probabilities,
                              double min_expected) {
  if (observed.size() != probabilities.size() || observed.empty()) throw ArgumentError("size mismatch");
  double total = 0.0;
  for (double o : observed) total += o;
  if (!(total > 0.0)) throw DegenerateInputError("no observations");
  double stat = 0.0;
  int cells = 0;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * probabilities[i];
    if (e < min_expected) {
      pooled_obs += observed[i];
      pooled_exp += e;
      continue;
    }
    stat += (observed[i] - e) * (observed[i] - e) / e;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  ChiSquareTest out;
  out.statistic = stat;
  out.dof = cells - 1;
  if (out.dof < 1) throw DegenerateInputError("fewer than two cells after pooling");
  out.pvalue = boost::math::cdf(boost::math::complement(boost::math::chi_squared(out.dof), stat));
  return out;
}

}  // namespace pinflip
