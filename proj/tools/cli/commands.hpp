#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pinflip/errors.hpp"

namespace pinflip::cli {

inline constexpr const char* kSchema = "pinflip/1";

// Flat run configuration; every field maps to one long flag and to one key of
// the --config file.
struct RunConfig {
  std::string command;
  std::string N;
  std::string lambda;
  std::string sigma;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  double horizon = 10.0;
  double epsilon = 0.25;
  double cadence = 1.0;
  std::string out;
  std::string format;  // empty: the command's default
  int jobs = 1;

  // exact
  std::optional<double> beta;
  bool renewal_check = false;
  bool tilted_walk = false;
  bool lmax_law = false;
  std::optional<int> marginal;

  // gap
  bool no_bounds = false;

  // sample
  std::string well = "any";

  // simulate
  std::string init = "tent";
  std::string events;
  bool coupling = false;
  double max_time = 1e7;

  // metastable
  double budget = 1e6;
  std::string times;

  // accept
  std::vector<int> criteria;
};

// Refusal of a run whose predicted cost exceeds the configured budget.
class BudgetRefusal : public CapacityError {
 public:
  BudgetRefusal(const std::string& what, double predicted, double budget)
      : CapacityError(what), predicted(predicted), budget(budget) {}
  double predicted;
  double budget;
};

// Each command writes its primary artifact to `out` and returns the exit status.
int run_phase(const RunConfig& cfg, std::ostream& out);
int run_exact(const RunConfig& cfg, std::ostream& out);
int run_gap(const RunConfig& cfg, std::ostream& out);
int run_sample(const RunConfig& cfg, std::ostream& out);
int run_simulate(const RunConfig& cfg, std::ostream& out);
int run_metastable(const RunConfig& cfg, std::ostream& out);
int run_accept(const RunConfig& cfg, std::ostream& out);

}  // namespace pinflip::cli
