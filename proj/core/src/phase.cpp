#include "pinflip/phase.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "pinflip/errors.hpp"
#include "pinflip/format.hpp"
#include "pinflip/logmath.hpp"

namespace pinflip {

namespace {

constexpr double kQuadRelTol = 1e-13;
constexpr unsigned kQuadDepth = 15;

template <class F>
double integrate(F f, double a, double b) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0, l1 = 0.0;
  const double v = Quad::integrate(f, a, b, kQuadDepth, kQuadRelTol, &err, &l1);
  // boost sums the error estimates of the rescaled [-1, 1] subproblems, so the
  // half-width turns it into a (loose) bound on the absolute error.
  err *= 0.5 * std::fabs(b - a);
  if (!(err <= 1e-12 * std::max(1.0, l1))) throw ConvergenceError("quadrature did not reach 1e-12", err);
  return v;
}

// The integrands are smooth but sharply curved at x = 1/2 for large sigma, so
// each half is integrated on its own.
template <class F>
double integrate_unit(F f) {
  return integrate(f, 0.0, 0.5) + integrate(f, 0.5, 1.0);
}

double bisect_log_cosh_root(double sigma, double target, double lo, double hi) {
  // log cosh(s * sigma) - target is increasing in s on [lo, hi].
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (log_cosh(mid * sigma) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double s = 0.5 * (lo + hi);
  const double slope = sigma * std::tanh(s * sigma);
  if (slope > 0.0) {
    const double polished = s - (log_cosh(s * sigma) - target) / slope;
    if (polished > lo && polished < hi) s = polished;
  }
  return s;
}

}  // namespace

const char* to_string(StaticRegime r) {
  switch (r) {
    case StaticRegime::kLocalized: return "localized";
    case StaticRegime::kDelocalized: return "delocalized";
    case StaticRegime::kCritical: return "critical";
  }
  return "?";
}

const char* to_string(DynamicRegime r) { return r == DynamicRegime::kSlow ? "slow" : "fast"; }

double free_energy_pinning(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be finite and >= 0");
  if (lambda <= 2.0) return 0.0;
  return std::log(lambda / (2.0 * std::sqrt(lambda - 1.0)));
}

AreaFreeEnergy free_energy_area(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ArgumentError("sigma must be finite and >= 0");
  if (sigma == 0.0) return {0.0, 0.0};
  AreaFreeEnergy out;
  out.G = integrate_unit([sigma](double x) { return log_cosh(sigma * (1.0 - 2.0 * x)); });
  out.Gprime = integrate_unit([sigma](double x) {
    const double t = 1.0 - 2.0 * x;
    return t * std::tanh(sigma * t);
  });
  return out;
}

Activation activation_energy(double lambda, double sigma) {
  const double F = free_energy_pinning(lambda);
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ArgumentError("sigma must be finite and >= 0");
  Activation out;
  if (sigma == 0.0 || F <= 0.0 || log_cosh(sigma) <= F) return out;

  const double beta = bisect_log_cosh_root(sigma, F, 0.0, 1.0);
  if (!(beta > 0.0 && beta < 1.0)) return out;
  out.beta_star = beta;
  out.stationarity_residual = log_cosh(beta * sigma) - F;

  // Both differences min(F, G) - u(beta*) are evaluated without cancellation:
  // F - u(beta*) = beta*^2 sigma G'(beta* sigma) and
  // G - u(beta*) = (1/sigma) int_{beta* sigma}^{sigma} (log cosh t - F) dt.
  const double s = beta * sigma;
  const double pinned_gap = beta * beta * sigma * free_energy_area(s).Gprime;
  const double area_gap = integrate([F](double t) { return log_cosh(t) - F; }, s, sigma) / sigma;
  out.E = std::min(pinned_gap, area_gap);
  return out;
}

double sigma0(double lambda) {
  const double F = free_energy_pinning(lambda);
  if (F <= 0.0) throw DomainError("sigma0 needs lambda > 2 (it degenerates to 0 below)");
  // log cosh s >= s - log 2, so the root lies below F + log 2.
  return bisect_log_cosh_root(1.0, F, 0.0, F + std::log(2.0) + 1.0);
}

double macroscopic_shape(double sigma, double u) {
  if (!(u >= 0.0 && u <= 2.0)) throw ArgumentError("u must lie in [0,2]");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ArgumentError("sigma must be finite and >= 0");
  if (sigma == 0.0) return 0.0;
  return (log_cosh(sigma) - log_cosh(sigma * (1.0 - u))) / sigma;
}

StaticRegime static_regime(double F, double G) {
  if (F == 0.0 && G == 0.0) return StaticRegime::kCritical;
  return G <= F ? StaticRegime::kLocalized : StaticRegime::kDelocalized;
}

PhasePoint phase_point(double lambda, double sigma) {
  PhasePoint p;
  p.lambda = lambda;
  p.sigma = sigma;
  p.F = free_energy_pinning(lambda);
  const AreaFreeEnergy g = free_energy_area(sigma);
  p.G = g.G;
  p.Gprime = g.Gprime;
  const Activation a = activation_energy(lambda, sigma);
  p.E = a.E;
  p.beta_star = a.beta_star;
  if (p.F > 0.0) p.sigma0 = sigma0(lambda);
  p.static_regime = static_regime(p.F, p.G);
  p.dynamic_regime = p.E > 0.0 ? DynamicRegime::kSlow : DynamicRegime::kFast;
  return p;
}

GridAxis GridAxis::parse(const std::string& text) {
  GridAxis axis;
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ArgumentError("bad range '" + text + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ArgumentError("bad range '" + text + "'");
    return v;
  };
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) {
    axis.lo = axis.hi = to_double(text);
    axis.step = 1.0;
    return axis;
  }
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ArgumentError("range must be lo:hi:step, got '" + text + "'");
  axis.lo = to_double(text.substr(0, c1));
  axis.hi = to_double(text.substr(c1 + 1, c2 - c1 - 1));
  axis.step = to_double(text.substr(c2 + 1));
  if (!(axis.step > 0.0) || axis.hi < axis.lo) throw ArgumentError("range needs lo <= hi and step > 0");
  return axis;
}

std::vector<double> GridAxis::values() const {
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) v.push_back(lo + static_cast<double>(i) * step);
  return v;
}

std::vector<PhasePoint> phase_grid(const GridAxis& lambdas, const GridAxis& sigmas) {
  std::vector<PhasePoint> out;
  for (double l : lambdas.values()) {
    for (double s : sigmas.values()) out.push_back(phase_point(l, s));
  }
  return out;
}

std::string phase_csv_header() {
  return "lambda,sigma,F,G,Gprime,E,beta_star,sigma0,static_regime,dynamic_regime";
}

std::string phase_csv_row(const PhasePoint& p) {
  std::string row = format_real(p.lambda) + ',' + format_real(p.sigma) + ',' + format_real(p.F) + ',' +
                    format_real(p.G) + ',' + format_real(p.Gprime) + ',' + format_real(p.E) + ',';
  if (p.beta_star) row += format_real(*p.beta_star);
  row += ',';
  if (p.sigma0) row += format_real(*p.sigma0);
  row += ',';
  row += to_string(p.static_regime);
  row += ',';
  row += to_string(p.dynamic_regime);
  return row;
}

}  // namespace pinflip
