#include "nlslab/report.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nlslab {

bool Check::pass() const {
  if (!std::isfinite(value)) return false;
  switch (kind) {
    case Kind::at_most: return value <= bound;
    case Kind::at_least: return value >= bound;
    case Kind::below: return value < bound;
  }
  return false;
}

static const char* bound_key(Check::Kind k) {
  switch (k) {
    case Check::Kind::at_most: return "max";
    case Check::Kind::at_least: return "min";
    case Check::Kind::below: return "below";
  }
  return "max";
}

bool VerificationReport::verdict() const {
  for (const Check& c : checks) {
    if (!c.pass()) return false;
  }
  return true;
}

void VerificationReport::merge(const VerificationReport& other, const std::string& prefix) {
  for (const Check& c : other.checks) checks.push_back({prefix + c.name, c.value, c.bound, c.kind});
  for (const auto& [n, v] : other.fitted_rates) fitted_rates.emplace_back(prefix + n, v);
  for (const Table& t : other.tables) tables.push_back({prefix + t.name, t.columns, t.rows});
  for (const auto& el : other.notes.items()) notes[prefix + el.key()] = el.value();
}

namespace {

// JSON has no NaN or infinity; such values are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

json VerificationReport::to_json(bool include_timing) const {
  json out;
  out["identity"] = identity;
  out["params"] = params;
  out["grid"] = grid;
  out["horizons"] = horizons;
  json res = json::array();
  for (const Check& c : checks) {
    res.push_back({{"name", c.name},
                   {"value", number(c.value)},
                   {bound_key(c.kind), c.bound},
                   {"pass", c.pass()}});
  }
  out["residuals"] = res;
  json rates = json::object();
  for (const auto& [n, v] : fitted_rates) rates[n] = number(v);
  out["fitted_rates"] = rates;
  json tabs = json::array();
  for (const Table& t : tables) {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = json::array();
      for (double v : r) row.push_back(number(v));
      rows.push_back(row);
    }
    tabs.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
  }
  out["tables"] = tabs;
  if (!notes.empty()) out["notes"] = notes;
  out["verdict"] = verdict() ? "pass" : "fail";
  if (include_timing) out["wall_seconds"] = wall_seconds;
  return out;
}

std::string VerificationReport::table_csv(const Table& t) const {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

json to_json(const GridDescriptor& g) {
  json axes = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    axes.push_back({{"N", g.axis(a).count}, {"h", g.axis(a).spacing}});
  }
  return {{"dim", g.dim()}, {"axes", axes}};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope needs at least two matching points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace nlslab
