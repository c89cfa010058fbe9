#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pinflip/path.hpp"

namespace pinflip {

enum class DynamicRegime { kFast, kSlow };

const char* to_string(StaticRegime r);
const char* to_string(DynamicRegime r);

// Pinning free energy: 0 for lambda <= 2, log(lambda / (2 sqrt(lambda - 1))) above.
double free_energy_pinning(double lambda);

struct AreaFreeEnergy {
  double G = 0.0;
  double Gprime = 0.0;
};

// G(sigma) = int_0^1 log cosh(sigma (1 - 2x)) dx and its sigma-derivative, each by
// its own adaptive Gauss-Kronrod quadrature (absolute tolerance 1e-12).
AreaFreeEnergy free_energy_area(double sigma);

struct Activation {
  double E = 0.0;
  std::optional<double> beta_star;
  double stationarity_residual = 0.0;  // log cosh(beta* sigma) - F at the returned root
};

// Barrier height min(G, F) - min_beta [beta G(beta sigma) + (1 - beta) F]. The
// interior minimiser exists iff log cosh(sigma) > F > 0.
Activation activation_energy(double lambda, double sigma);

// Threshold tilt arccosh(exp F(lambda)); DomainError for lambda <= 2.
double sigma0(double lambda);

// (1/sigma) log(cosh sigma / cosh(sigma (1 - u))) for u in [0, 2]; 0 at sigma = 0.
double macroscopic_shape(double sigma, double u);

struct PhasePoint {
  double lambda = 0.0;
  double sigma = 0.0;
  double F = 0.0;
  double G = 0.0;
  double Gprime = 0.0;
  double E = 0.0;
  std::optional<double> beta_star;
  std::optional<double> sigma0;  // absent for lambda <= 2
  StaticRegime static_regime = StaticRegime::kCritical;
  DynamicRegime dynamic_regime = DynamicRegime::kFast;
};

PhasePoint phase_point(double lambda, double sigma);

// Static regime from the two free energies: critical only at F = G = 0.
StaticRegime static_regime(double F, double G);

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  // Parses "lo:hi:step" or a single value.
  static GridAxis parse(const std::string& text);
  std::vector<double> values() const;
};

// Row-major over lambda then sigma.
std::vector<PhasePoint> phase_grid(const GridAxis& lambdas, const GridAxis& sigmas);

std::string phase_csv_header();
std::string phase_csv_row(const PhasePoint& p);

}  // namespace pinflip
