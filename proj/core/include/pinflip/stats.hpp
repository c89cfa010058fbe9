#pragma once

#include <span>
#include <vector>

namespace pinflip {

// Asymptotic Kolmogorov tail P(sqrt(n) D_n > x) with the finite-n correction
// x -> (sqrt(n) + 0.12 + 0.11 / sqrt(n)) D.
double kolmogorov_pvalue(double D, std::size_t n);

// sup |F_n - F| for the exponential law with the given rate.
double ks_exponential(std::span<const double> samples, double rate);

struct ExponentialFit {
  double rate = 0.0;       // uncensored count / total exposure
  double mean = 0.0;       // 1 / rate
  double ci_low = 0.0;     // 95% chi-square interval for the rate
  double ci_high = 0.0;
  double ks = 0.0;         // uncensored times vs Exp(rate)
  double ks_pvalue = 0.0;
  std::size_t n = 0;
  std::size_t censored = 0;
};

// censored[i] marks times[i] as a lower bound (right censoring). EstimationError
// with fewer than two uncensored observations.
ExponentialFit exponential_fit(std::span<const double> times, const std::vector<bool>& censored);
ExponentialFit exponential_fit(std::span<const double> times);

struct ChiSquareTest {
  double statistic = 0.0;
  int dof = 0;
  double pvalue = 0.0;
};

// Pearson test of counts against probabilities; cells with expected count below
// min_expected are pooled into one.
ChiSquareTest chi_square_test(std::span<const double> observed, std::span<const double> probabilities,
                              double min_expected = 5.0);

}  // namespace pinflip
