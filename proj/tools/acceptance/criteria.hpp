#pragma once

#include <string>

namespace pinflip::acceptance {

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 12;

const char* criterion_name(int id);

// Runs one criterion with its pinned seeds and tolerances. Exceptions from the
// library are caught and reported as a failure with the message.
Outcome run_criterion(int id, int jobs = 1);

// "PASS  3 renewal ..." style report line.
std::string format_line(const Outcome& outcome);

}  // namespace pinflip::acceptance
