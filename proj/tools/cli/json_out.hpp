#pragma once

#include <cmath>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pinflip/format.hpp"

namespace pinflip::cli {

using json = nlohmann::ordered_json;

// Non-finite values have no JSON spelling; they become null.
inline json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json optional_real(const std::optional<double>& v) { return v ? real(*v) : json(nullptr); }

inline json real_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

// Pretty printer that spells floats with 17 significant digits; arrays of
// scalars stay on one line.
inline void write_value(std::ostream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << "  " << json(it.key()).dump() << ": ";
        write_value(os, it.value(), indent + 2);
      }
      os << '\n' << pad << '}';
      break;
    }
    case json::value_t::array: {
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      if (j.empty() || flat) {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_value(os, j[i], indent);
        }
        os << ']';
        break;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad << "  ";
        write_value(os, j[i], indent + 2);
      }
      os << '\n' << pad << ']';
      break;
    }
    case json::value_t::number_float:
      os << format_real(j.get<double>());
      break;
    default:
      os << j.dump();
  }
}

inline void write_json(std::ostream& os, const json& j) {
  write_value(os, j, 0);
  os << '\n';
}

}  // namespace pinflip::cli
