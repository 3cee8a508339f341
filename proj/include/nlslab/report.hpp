#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nlslab/grid.hpp"

namespace nlslab {

using json = nlohmann::ordered_json;

// One verdict line. at_most: pass iff value ≤ bound; at_least: value ≥ bound;
// below: value < bound.
struct Check {
  enum class Kind { at_most, at_least, below };
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  Kind kind = Kind::at_most;

  bool pass() const;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct VerificationReport {
  std::string identity;
  json params = json::object();
  json grid = json::object();
  std::vector<double> horizons;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> fitted_rates;
  std::vector<Table> tables;
  json notes = json::object();  // anything reported but not judged
  double wall_seconds = 0.0;

  bool verdict() const;
  void add(std::string name, double value, double bound, Check::Kind kind = Check::Kind::at_most) {
    checks.push_back({std::move(name), value, bound, kind});
  }
  // Appends the checks, rates and tables of other, prefixing names with prefix.
  void merge(const VerificationReport& other, const std::string& prefix);

  // The wall-clock time is written only when include_timing is set, so that
  // repeated runs can be compared byte for byte.
  json to_json(bool include_timing = true) const;
  std::string table_csv(const Table& t) const;
};

json to_json(const GridDescriptor& g);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlslab
