#include "nlslab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nlslab/error.hpp"
#include "nlslab/snapshot_io.hpp"
#include "nlslab/spectral.hpp"
#include "nlslab/transforms.hpp"

namespace nlslab {

namespace {

struct ExperimentName {
  Experiment e;
  const char* name;
};

constexpr ExperimentName kNames[] = {
    {Experiment::solve, "solve"},
    {Experiment::wave_op, "wave_op"},
    {Experiment::thm1, "thm1"},
    {Experiment::conjugation, "conjugation"},
    {Experiment::corollary2, "corollary2"},
    {Experiment::proposition, "proposition"},
    {Experiment::dnls_gauge, "dnls_gauge"},
    {Experiment::subcritical, "subcritical"},
    {Experiment::lemmas, "lemmas"},
    {Experiment::spectral, "spectral"},
    {Experiment::convergence, "convergence"},
    {Experiment::determinism, "determinism"},
};

[[noreturn]] void config_error(const std::string& what) { throw ConfigError("config: " + what); }

double rel(const ComplexField& a, const ComplexField& b) {
  return l2_distance(a, b) / l2_norm(b);
}

std::string mu_tag(double mu) {
  std::ostringstream os;
  os << "mu" << std::showpos << mu << ".";
  return os.str();
}

}  // namespace

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& n : kNames) v.push_back(n.e);
    return v;
  }();
  return all;
}

const char* to_string(Experiment e) {
  for (const auto& n : kNames) {
    if (n.e == e) return n.name;
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& n : kNames) {
    if (name == n.name) return n.e;
  }
  std::string known;
  for (const auto& n : kNames) known += std::string(known.empty() ? "" : ", ") + n.name;
  config_error("unknown experiment '" + name + "' (known: " + known + ")");
}

// ---------------------------------------------------------------------------
// Initial data

namespace {

double profile(const DatumSpec& s, std::span<const double> x) {
  double r2 = 0.0;
  for (double xi : x) r2 += (xi - s.center) * (xi - s.center);
  if (s.kind == DatumSpec::Kind::sech) return 1.0 / std::cosh(std::sqrt(r2) / s.width);
  return std::exp(-r2 / (2.0 * s.width * s.width));
}

// Factor applied to the unit-amplitude profile.
double datum_scale(const DatumSpec& s, const ComplexField& unit_profile) {
  if (!s.normalize) return s.amplitude;
  const double n = l2_norm(unit_profile);
  if (n == 0.0) throw NumericalError("harness", "cannot normalize a zero datum");
  return s.amplitude / n;
}

}  // namespace

ComplexField make_datum(const DatumSpec& spec, const GridDescriptor& grid) {
  ComplexField f;
  if (spec.kind == DatumSpec::Kind::file) {
    std::ifstream probe(spec.path, std::ios::binary);
    if (!probe) config_error("cannot open datum file " + spec.path.string());
    probe.close();
    f = read_snapshot(spec.path);
    if (!(f.grid() == grid)) config_error("datum file " + spec.path.string() + " is on another grid");
    if (f.space() != Space::position) config_error("datum file must hold a position field");
  } else {
    if (!(spec.width > 0.0)) config_error("datum.width must be positive");
    const double k = spec.kind == DatumSpec::Kind::gaussian ? 0.0 : spec.wavenumber;
    f = ComplexField::sample(grid, Space::position, [&](std::span<const double> x) {
      return profile(spec, x) * std::polar(1.0, k * x[0]);
    });
  }
  f *= datum_scale(spec, f);
  const FieldDiagnostics d = diagnostics(f);
  if (d.boundary_mass_fraction > 1e-6 || d.spectral_tail_fraction > 1e-6) {
    std::ostringstream msg;
    msg << "datum not resolved on the grid (boundary mass " << d.boundary_mass_fraction
        << ", spectral tail " << d.spectral_tail_fraction << ")";
    throw NumericalError("harness", msg.str());
  }
  return f;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

// Every default in one place. Sections shared by all experiments come first;
// default_config() then overrides grid, datum and the run block per experiment.
json base_defaults() {
  const ScatteringConfig s;
  const QuadratureSpec q;
  const StepControl c;
  json j;
  j["experiment"] = "";
  j["grid"] = {{"dim", 1}, {"count", 4096}, {"spacing", 0.0625}};
  // sigma null means the critical power 2/dim.
  j["equation"] = {{"mu", 1.0}, {"sigma", nullptr}, {"lambda", 1.0}};
  j["datum"] = {{"kind", "gaussian"}, {"amplitude", 1.0}, {"width", 1.0},  {"center", 0.0},
                {"wavenumber", 0.0},  {"normalize", false}, {"path", ""}};
  j["step"] = {{"dt", c.dt},
               {"max_steps", c.max_steps},
               {"mass_drift_tol", c.mass_drift_tol},
               {"tail_tol", c.tail_tol},
               {"boundary_tol", c.boundary_tol}};
  j["scattering"] = {{"horizon", s.horizon},         {"ladder_factor", s.ladder_factor},
                     {"rungs", s.rungs},             {"tol", s.tol},
                     {"initializer", to_string(s.initializer)},
                     {"switch_time", s.switch_time}, {"near_dt", s.near_dt},
                     {"step_growth", s.step_growth}, {"small_data", s.small_data},
                     {"strict", s.strict}};
  j["quadrature"] = {{"T_max", q.T_max},
                     {"panels", q.panels},
                     {"grading", q.grading},
                     {"tail_terms", q.tail_terms},
                     {"tail", q.tail},
                     {"refine", q.refine},
                     {"max_refinement", q.max_refinement},
                     {"switch_time", q.switch_time},
                     {"parallel", q.parallel},
                     {"threads", q.threads}};
  j["output"] = {{"snapshots", false}};
  j["run"] = json::object();
  return j;
}

}  // namespace

json default_config(Experiment e) {
  json j = base_defaults();
  j["experiment"] = to_string(e);
  json& run = j["run"];
  json& datum = j["datum"];
  auto small_gaussian = [&] {
    datum["amplitude"] = 0.3;
    datum["normalize"] = true;
  };
  switch (e) {
    case Experiment::solve:
      j["grid"]["count"] = 1024;
      run = {{"t_end", 1.0}, {"stride", 100}, {"exact_tol", 1e-12}};
      break;
    case Experiment::wave_op:
      small_gaussian();
      j["scattering"]["strict"] = false;
      run = {{"signs", {"+", "-"}}, {"inverse", false}};
      break;
    case Experiment::thm1:
      small_gaussian();
      run = {{"mus", {1.0, -1.0}}, {"tolerance", 1e-3}};
      break;
    case Experiment::conjugation:
      small_gaussian();
      run = {{"mus", {1.0, -1.0}}, {"tolerance", 1e-3}};
      break;
    case Experiment::corollary2:
      run = {{"tolerance", 1e-4}, {"refinement_tol", 1e-6}};
      break;
    case Experiment::proposition:
      datum["normalize"] = true;
      run = {{"deltas", {0.4, 0.2, 0.1}}};
      break;
    case Experiment::dnls_gauge:
      j["grid"] = {{"dim", 1}, {"count", 2048}, {"spacing", 0.025}};
      datum["kind"] = "sech";
      datum["amplitude"] = 0.3;
      run = {{"t_end", 1.0}, {"snapshots", 5}, {"tolerance", 1e-5}, {"involution_tol", 1e-12}};
      break;
    case Experiment::subcritical:
      run = {{"sigma", 1.5},
             {"tolerance", 1e-4},
             {"refinement_tol", 1e-6},
             {"singular_exponents", {-0.5, -0.25}},
             {"singular_tol", 1e-10}};
      break;
    case Experiment::lemmas:
      j["grid"]["count"] = 1024;
      small_gaussian();
      run = {{"psi_times", {10.0, 20.0, 40.0, 80.0}},
             {"psi_grid", {{"count", 8192}, {"spacing", 0.15625}}},
             {"psi_slope_max", -0.4},
             {"involution_times", {0.3, -0.4, 2.5}},
             {"involution_tol", 1e-6},
             {"mus", {1.0}},
             {"decay_times", {1.0, 2.0, 4.0, 8.0}},
             {"state_times", {2.0, 4.0, 8.0}}};
      break;
    case Experiment::spectral:
      run = {{"seed", 7},
             {"roundtrip_tol", 1e-12},
             {"propagator_times", {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0}},
             {"propagator_tol", 1e-8},
             {"group_pairs", {{0.3, 0.7}, {2.5, -1.1}, {-4.0, 9.0}}},
             {"group_tol", 1e-13},
             {"factorization_times", {0.5, 1.0, 2.0, 5.0}},
             {"factorization_tol", 1e-8}};
      break;
    case Experiment::convergence:
      j["grid"] = {{"dim", 1}, {"count", 2048}, {"spacing", 0.025}};
      datum["amplitude"] = 0.8;
      run = {{"mass_dt", 1e-4},
             {"mass_steps", 10000},
             {"mass_tol", 1e-11},
             {"order_dt", 0.02},
             {"order_t_end", 1.0},
             {"order_reference_divisor", 64},
             {"order_min", 3.5},
             {"order_max", 4.5},
             {"dnls_dt", 0.01},
             {"dnls_reference_divisor", 16},
             {"dnls_order_min", 12.0},
             {"dnls_order_max", 20.0},
             {"dnls_mass_dt", 1e-3},
             {"dnls_mass_tol", 1e-8}};
      break;
    case Experiment::determinism:
      run = {{"experiment", "corollary2"}, {"parallel_tol", 1e-13}};
      break;
  }
  return j;
}

namespace {

// Overlay user onto def, with def as the schema: objects may only carry known
// keys, leaves must keep their JSON type, integers stay integers.
json overlay(const json& def, const json& user, const std::string& where) {
  const std::string at = where.empty() ? "top level" : where;
  if (def.is_object()) {
    if (!user.is_object()) config_error(at + " must be an object");
    json out = def;
    for (const auto& el : user.items()) {
      const std::string key = where.empty() ? el.key() : where + "." + el.key();
      if (!def.contains(el.key())) config_error("unknown key " + key);
      out[el.key()] = overlay(def[el.key()], el.value(), key);
    }
    return out;
  }
  if (def.is_null()) {
    if (!user.is_null() && !user.is_number()) config_error(at + " must be a number or null");
    return user;
  }
  if (def.is_number()) {
    if (!user.is_number()) config_error(at + " must be a number");
    if (def.is_number_integer() && !user.is_number_integer()) config_error(at + " must be an integer");
    if (def.is_number_unsigned() && user.is_number_integer() && user.get<long long>() < 0) {
      config_error(at + " must be non-negative");
    }
    return user;
  }
  if (def.is_boolean()) {
    if (!user.is_boolean()) config_error(at + " must be true or false");
    return user;
  }
  if (def.is_string()) {
    if (!user.is_string()) config_error(at + " must be a string");
    return user;
  }
  if (def.is_array()) {
    if (!user.is_array()) config_error(at + " must be an array");
    if (!def.empty()) {
      for (std::size_t i = 0; i < user.size(); ++i) {
        overlay(def[0], user[i], at + "[" + std::to_string(i) + "]");
      }
    }
    return user;
  }
  config_error(at + ": unsupported default");
}

void require(bool ok, const std::string& what) {
  if (!ok) config_error(what);
}

DatumSpec::Kind parse_kind(const std::string& s) {
  if (s == "gaussian") return DatumSpec::Kind::gaussian;
  if (s == "modulated_gaussian") return DatumSpec::Kind::modulated_gaussian;
  if (s == "sech") return DatumSpec::Kind::sech;
  if (s == "file") return DatumSpec::Kind::file;
  config_error("datum.kind must be gaussian, modulated_gaussian, sech or file, not '" + s + "'");
}

Sign parse_sign(const std::string& s) {
  if (s == "+") return Sign::plus;
  if (s == "-") return Sign::minus;
  config_error("signs must be \"+\" or \"-\", not '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(Experiment e, const json& user) {
  ExperimentConfig c;
  c.experiment = e;
  if (user.is_object() && user.contains("experiment")) {
    require(user["experiment"].is_string() && user["experiment"].get<std::string>() == to_string(e),
            "config names experiment " + user["experiment"].dump() + " but " + to_string(e) +
                " was requested");
  }
  json r = overlay(default_config(e), user.is_null() ? json::object() : user, "");

  const json& g = r["grid"];
  const int dim = g["dim"].get<int>();
  require(dim == 1 || dim == 2, "grid.dim must be 1 or 2");
  try {
    const std::size_t count = g["count"].get<std::size_t>();
    const double h = g["spacing"].get<double>();
    c.grid = dim == 1 ? GridDescriptor::line(count, h) : GridDescriptor::square(count, h);
  } catch (const std::invalid_argument& ex) {
    config_error(std::string("grid: ") + ex.what());
  }

  json& eq = r["equation"];
  if (eq["sigma"].is_null()) eq["sigma"] = 2.0 / dim;
  c.equation = {dim, eq["sigma"].get<double>(), eq["mu"].get<double>()};
  c.lambda = eq["lambda"].get<double>();
  require(c.equation.sigma > 0.0, "equation.sigma must be positive");

  const json& d = r["datum"];
  c.datum.kind = parse_kind(d["kind"].get<std::string>());
  c.datum.amplitude = d["amplitude"].get<double>();
  c.datum.width = d["width"].get<double>();
  c.datum.center = d["center"].get<double>();
  c.datum.wavenumber = d["wavenumber"].get<double>();
  c.datum.normalize = d["normalize"].get<bool>();
  c.datum.path = d["path"].get<std::string>();
  require(c.datum.width > 0.0, "datum.width must be positive");
  require(c.datum.kind != DatumSpec::Kind::file || !c.datum.path.empty(),
          "datum.path is required for kind file");

  const json& st = r["step"];
  c.step.dt = st["dt"].get<double>();
  c.step.max_steps = st["max_steps"].get<std::size_t>();
  c.step.mass_drift_tol = st["mass_drift_tol"].get<double>();
  c.step.tail_tol = st["tail_tol"].get<double>();
  c.step.boundary_tol = st["boundary_tol"].get<double>();
  require(c.step.dt > 0.0, "step.dt must be positive");

  const json& sc = r["scattering"];
  c.scattering.horizon = sc["horizon"].get<double>();
  c.scattering.ladder_factor = sc["ladder_factor"].get<double>();
  c.scattering.rungs = sc["rungs"].get<int>();
  c.scattering.tol = sc["tol"].get<double>();
  const std::string init = sc["initializer"].get<std::string>();
  require(init == "born" || init == "free", "scattering.initializer must be born or free");
  c.scattering.initializer = init == "born" ? Initializer::born : Initializer::free;
  c.scattering.switch_time = sc["switch_time"].get<double>();
  c.scattering.near_dt = sc["near_dt"].get<double>();
  c.scattering.step_growth = sc["step_growth"].get<double>();
  c.scattering.small_data = sc["small_data"].get<double>();
  c.scattering.strict = sc["strict"].get<bool>();
  require(c.scattering.rungs >= 2, "scattering.rungs must be at least 2");
  require(c.scattering.horizon > c.scattering.switch_time && c.scattering.switch_time > 0.0,
          "scattering needs 0 < switch_time < horizon");
  require(c.scattering.ladder_factor > 1.0, "scattering.ladder_factor must exceed 1");
  require(c.scattering.near_dt > 0.0 && c.scattering.step_growth > 0.0,
          "scattering.near_dt and step_growth must be positive");

  const json& q = r["quadrature"];
  c.quadrature.T_max = q["T_max"].get<double>();
  c.quadrature.panels = q["panels"].get<int>();
  c.quadrature.grading = q["grading"].get<double>();
  c.quadrature.tail_terms = q["tail_terms"].get<int>();
  c.quadrature.tail = q["tail"].get<bool>();
  c.quadrature.refine = q["refine"].get<bool>();
  c.quadrature.max_refinement = q["max_refinement"].get<double>();
  c.quadrature.switch_time = q["switch_time"].get<double>();
  c.quadrature.parallel = q["parallel"].get<bool>();
  c.quadrature.threads = q["threads"].get<unsigned>();
  require(c.quadrature.T_max > 0.0 && c.quadrature.panels >= 4,
          "quadrature needs T_max > 0 and panels >= 4");
  require(c.quadrature.tail_terms >= 1 && c.quadrature.tail_terms <= 6,
          "quadrature.tail_terms must be in 1..6");

  c.write_snapshots = r["output"]["snapshots"].get<bool>();
  c.run = r["run"];

  switch (e) {
    case Experiment::wave_op:
      for (const auto& s : c.run["signs"]) parse_sign(s.get<std::string>());
      break;
    case Experiment::dnls_gauge:
      require(dim == 1, "dnls_gauge needs grid.dim = 1");
      require(c.run["snapshots"].get<int>() >= 3, "run.snapshots must be at least 3");
      break;
    case Experiment::proposition:
      require(c.run["deltas"].size() >= 3, "run.deltas needs at least 3 entries");
      break;
    case Experiment::spectral:
      require(c.datum.kind == DatumSpec::Kind::gaussian ||
                  c.datum.kind == DatumSpec::Kind::modulated_gaussian,
              "spectral compares against the Gaussian solution; datum.kind must be a Gaussian");
      for (const auto& pr : c.run["group_pairs"]) require(pr.size() == 2, "group_pairs hold pairs");
      break;
    case Experiment::convergence:
      require(dim == 1, "convergence needs grid.dim = 1 (the DNLS part is one-dimensional)");
      break;
    case Experiment::determinism: {
      const Experiment inner = parse_experiment(c.run["experiment"].get<std::string>());
      require(inner != Experiment::determinism, "determinism cannot wrap itself");
      break;
    }
    default:
      break;
  }
  c.resolved = std::move(r);
  return c;
}

ExperimentConfig load_config(Experiment e, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open " + path.string());
  json user;
  try {
    user = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& ex) {
    config_error(path.string() + ": " + ex.what());
  }
  return parse_config(e, user);
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

using Fields = std::vector<NamedField>*;

void keep(Fields fields, std::string name, const ComplexField& f) {
  if (fields) fields->push_back({std::move(name), f});
}

std::vector<double> doubles(const json& j) { return j.get<std::vector<double>>(); }

VerificationReport run_solve(const ExperimentConfig& c, Fields fields) {
  const ComplexField u0 = make_datum(c.datum, c.grid);
  const double t_end = c.run["t_end"].get<double>();
  const auto stride = c.run["stride"].get<std::size_t>();
  std::vector<SnapshotAtTime> traj;
  const Evolution e = nls_evolve(u0, 0.0, t_end, c.equation, c.step,
                                 [&](const SnapshotAtTime& s) { traj.push_back(s); },
                                 std::max<std::size_t>(stride, 1));
  VerificationReport rep;
  rep.identity = "split-step evolution";
  rep.params = {{"t_end", t_end}, {"dt", c.step.dt}, {"stride", stride}};
  rep.grid = to_json(c.grid);
  rep.add("mass_drift", e.health.mass_drift, c.step.mass_drift_tol);
  rep.add("spectral_tail", e.health.spectral_tail, c.step.tail_tol);
  rep.add("boundary_mass", e.health.boundary_mass, c.step.boundary_tol);
  rep.notes["steps"] = e.health.steps;
  rep.notes["dt_used"] = e.health.dt_used;

  Table t{"trajectory", {"t", "l2", "linf"}, {}};
  for (const auto& s : traj) {
    const Norms n = norms(s.field);
    t.rows.push_back({s.time, n.l2, n.linf});
  }
  rep.tables.push_back(std::move(t));

  // The final partial step breaks equispacing; drop it for the residual.
  if (traj.size() >= 3) {
    const double d0 = traj[1].time - traj[0].time;
    const double dn = traj.back().time - traj[traj.size() - 2].time;
    if (std::abs(dn - d0) > 1e-9 * std::abs(d0)) traj.pop_back();
  }
  if (traj.size() >= 3) rep.notes["centered_difference_residual"] = residual(traj, c.equation);

  if (c.equation.mu == 0.0) {
    rep.add("free_propagation_error", rel(e.field, free_propagate(u0, t_end)),
            c.run["exact_tol"].get<double>());
  }
  keep(fields, "initial", u0);
  keep(fields, "final", e.field);
  return rep;
}

VerificationReport run_wave_op(const ExperimentConfig& c, Fields fields) {
  const ComplexField u = make_datum(c.datum, c.grid);
  const bool inverse = c.run["inverse"].get<bool>();
  VerificationReport rep;
  rep.identity = inverse ? "inverse wave operator" : "wave operator";
  rep.grid = to_json(c.grid);
  const double m0 = std::pow(l2_norm(u), 2);
  for (const auto& js : c.run["signs"]) {
    const Sign s = parse_sign(js.get<std::string>());
    const std::string tag = std::string(inverse ? "W^-1" : "W") + to_string(s) + ".";
    const ScatteringResult r = inverse ? inverse_wave_operator(u, s, c.equation, c.scattering)
                                       : wave_operator(u, s, c.equation, c.scattering);
    rep.horizons = r.horizons;
    rep.merge(ladder_report(r, ""), tag);
    rep.add(tag + "last_ladder_change", r.horizon_ladder.back().change, c.scattering.tol);
    rep.add(tag + "ladder_converged", r.converged ? 1.0 : 0.0, 1.0, Check::Kind::at_least);
    rep.notes[tag + "relative_mass_change"] = std::abs(std::pow(l2_norm(r.field), 2) - m0) / m0;
    keep(fields, tag + "result", r.field);
  }
  return rep;
}

template <class Verify>
VerificationReport per_mu(const ExperimentConfig& c, const std::string& identity, Verify verify) {
  const ComplexField u0 = make_datum(c.datum, c.grid);
  VerificationReport rep;
  rep.identity = identity;
  rep.grid = to_json(c.grid);
  for (double mu : doubles(c.run["mus"])) {
    NLSParams p = c.equation;
    p.mu = mu;
    const VerificationReport one = verify(u0, p);
    rep.horizons = one.horizons;
    rep.params[mu_tag(mu)] = one.params;
    rep.merge(one, mu_tag(mu));
  }
  return rep;
}

VerificationReport run_thm1(const ExperimentConfig& c, Fields) {
  const double tol = c.run["tolerance"].get<double>();
  return per_mu(c, "F W_pm^-1 = W_mp F", [&](const ComplexField& u0, const NLSParams& p) {
    return verify_theorem1(u0, p, c.scattering, tol);
  });
}

VerificationReport run_conjugation(const ExperimentConfig& c, Fields) {
  const double tol = c.run["tolerance"].get<double>();
  return per_mu(c, "W_pm^-1 = (CF)^-1 W_pm (CF); W_pm = C W_mp C",
                [&](const ComplexField& u0, const NLSParams& p) {
                  return verify_conjugation(u0, p, c.scattering, tol);
                });
}

VerificationReport run_corollary2(const ExperimentConfig& c, Fields) {
  return verify_corollary2(make_datum(c.datum, c.grid), c.quadrature,
                           c.run["tolerance"].get<double>(),
                           c.run["refinement_tol"].get<double>());
}

VerificationReport run_proposition(const ExperimentConfig& c, Fields) {
  return verify_proposition(make_datum(c.datum, c.grid), doubles(c.run["deltas"]), c.equation,
                            c.scattering, c.quadrature);
}

VerificationReport run_subcritical(const ExperimentConfig& c, Fields) {
  VerificationReport rep =
      verify_subcritical(make_datum(c.datum, c.grid), c.run["sigma"].get<double>(), c.quadrature,
                         c.run["tolerance"].get<double>(), c.run["refinement_tol"].get<double>());
  // The weight exponent of the identities is always among the scalar oracles.
  std::vector<double> exps{c.grid.dim() * c.run["sigma"].get<double>() - 2.0};
  for (double a : doubles(c.run["singular_exponents"])) {
    if (std::none_of(exps.begin(), exps.end(), [a](double b) { return std::abs(a - b) < 1e-12; })) {
      exps.push_back(a);
    }
  }
  const VerificationReport oracle = verify_singular_rule(exps, c.run["singular_tol"].get<double>());
  rep.merge(oracle, "scalar.");
  return rep;
}

VerificationReport run_dnls_gauge(const ExperimentConfig& c, Fields) {
  const ComplexField u0 = make_datum(c.datum, c.grid);
  const double lambda = c.lambda;
  const double t_end = c.run["t_end"].get<double>();
  const int samples = c.run["snapshots"].get<int>();
  const auto steps = static_cast<std::size_t>(std::llround(t_end / c.step.dt));
  if (steps % static_cast<std::size_t>(samples - 1) != 0) {
    config_error("run.t_end / step.dt must be a multiple of run.snapshots - 1");
  }
  const std::size_t stride = steps / static_cast<std::size_t>(samples - 1);
  const double tol = c.run["tolerance"].get<double>();
  const double inv_tol = c.run["involution_tol"].get<double>();

  auto trajectories = [&](double mu) {
    std::vector<SnapshotAtTime> us, psis;
    nls_evolve(u0, 0.0, t_end, {1, 2.0, mu}, c.step,
               [&](const SnapshotAtTime& s) { us.push_back(s); }, stride);
    dnls_evolve(gauge(u0, {lambda, Sign::plus}), 0.0, t_end, {lambda}, c.step,
                [&](const SnapshotAtTime& s) { psis.push_back(s); }, stride);
    if (us.size() != psis.size()) throw NumericalError("harness", "trajectory lengths differ");
    return std::pair{us, psis};
  };

  VerificationReport rep;
  rep.identity = "gauge equivalence of DNLS and the quintic equation";
  rep.params = {{"lambda", lambda},
                {"quintic_mu", 0.5 * lambda * lambda},
                {"t_end", t_end},
                {"dt", c.step.dt},
                {"snapshots", samples}};
  rep.grid = to_json(c.grid);
  const auto [us, psis] = trajectories(0.5 * lambda * lambda);
  Table t{"gauge", {"t", "forward", "backward", "involution"}, {}};
  double fwd = 0.0, bwd = 0.0, inv = 0.0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double f = rel(gauge(us[i].field, {lambda, Sign::plus}), psis[i].field);
    const double b = rel(gauge(psis[i].field, {lambda, Sign::minus}), us[i].field);
    double v = 0.0;
    for (const ComplexField* x : {&us[i].field, &psis[i].field}) {
      v = std::max(v, rel(gauge(gauge(*x, {lambda, Sign::minus}), {lambda, Sign::plus}), *x));
      v = std::max(v, rel(gauge(gauge(*x, {lambda, Sign::plus}), {lambda, Sign::minus}), *x));
    }
    fwd = std::max(fwd, f);
    bwd = std::max(bwd, b);
    inv = std::max(inv, v);
    t.rows.push_back({us[i].time, f, b, v});
  }
  rep.tables.push_back(std::move(t));
  rep.add("forward_max_relative_residual", fwd, tol);
  rep.add("backward_max_relative_residual", bwd, tol);
  rep.add("involution_max_relative_residual", inv, inv_tol);

  // The opposite sign of the quintic term, reported but not judged.
  const auto [us2, psis2] = trajectories(-0.5 * lambda * lambda);
  double other = 0.0;
  for (std::size_t i = 0; i < us2.size(); ++i) {
    other = std::max(other, rel(gauge(us2[i].field, {lambda, Sign::plus}), psis2[i].field));
  }
  rep.notes["opposite_sign_forward_max_relative_residual"] = other;
  return rep;
}

VerificationReport run_lemmas(const ExperimentConfig& c, Fields) {
  const ComplexField u0 = make_datum(c.datum, c.grid);
  const double norm0 = l2_norm(u0);
  VerificationReport rep;
  rep.identity = "pseudo-conformal transform and lens-frame limits";
  rep.grid = to_json(c.grid);

  // Ψ applied to frozen data against U₀(t)F⁻¹φ, on a grid wide enough for t.
  {
    const json& pg = c.run["psi_grid"];
    const auto count = pg["count"].get<std::size_t>();
    const double h = pg["spacing"].get<double>();
    const GridDescriptor big =
        c.grid.dim() == 1 ? GridDescriptor::line(count, h) : GridDescriptor::square(count, h);
    const ComplexField phi_hat = as_frequency(resample(u0, big.dual()));
    const ComplexField base = inverse_fourier(phi_hat);
    const std::vector<double> ts = doubles(c.run["psi_times"]);
    std::vector<double> errs;
    Table t{"psi_frozen", {"t", "relative_error"}, {}};
    for (double tt : ts) {
      const SnapshotAtTime v = pseudo_conformal({u0, -1.0 / tt}, big);
      errs.push_back(l2_distance(v.field, free_propagate(base, tt)) / norm0);
      t.rows.push_back({tt, errs.back()});
    }
    rep.tables.push_back(std::move(t));
    const double slope = loglog_slope(ts, errs);
    rep.fitted_rates.emplace_back("psi_frozen.slope", slope);
    rep.add("psi_frozen.slope", slope, c.run["psi_slope_max"].get<double>());
  }

  // Ψ² = R on evolved snapshots.
  {
    Table t{"psi_squared", {"t", "relative_error"}, {}};
    double worst = 0.0;
    for (double tau : doubles(c.run["involution_times"])) {
      const ComplexField u = nls_evolve(u0, 0.0, tau, c.equation, c.step).field;
      const SnapshotAtTime twice = pseudo_conformal(pseudo_conformal({u, tau}));
      const double e = l2_distance(twice.field, reflect(u)) / l2_norm(u);
      worst = std::max(worst, e);
      t.rows.push_back({tau, e});
    }
    rep.tables.push_back(std::move(t));
    rep.add("psi_squared.max_relative_error", worst, c.run["involution_tol"].get<double>());
  }

  LensFrameOptions o;
  o.decay_times = doubles(c.run["decay_times"]);
  o.state_times = doubles(c.run["state_times"]);
  for (double mu : doubles(c.run["mus"])) {
    NLSParams p = c.equation;
    p.mu = mu;
    const VerificationReport one = verify_lemma23(u0, p, c.scattering, o);
    rep.merge(one, "lens." + mu_tag(mu));
    rep.params["lens." + mu_tag(mu)] = one.params;
  }
  return rep;
}

// Random smooth field: Gaussian-enveloped random spectrum.
ComplexField random_smooth(const GridDescriptor& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const ComplexField hat = ComplexField::sample(g.dual(), Space::frequency,
                                                [&](std::span<const double> xi) {
    double r2 = 0.0;
    for (double v : xi) r2 += v * v;
    return std::exp(-r2 / 2.0) * cplx(normal(rng), normal(rng));
  });
  return inverse_fourier(hat);
}

VerificationReport run_spectral(const ExperimentConfig& c, Fields) {
  const ComplexField phi = make_datum(c.datum, c.grid);
  const DatumSpec& d = c.datum;
  const double k = d.kind == DatumSpec::Kind::gaussian ? 0.0 : d.wavenumber;
  const double alpha = d.width * d.width;
  const int n = c.grid.dim();
  const double scale = [&] {
    DatumSpec unit = d;
    unit.amplitude = 1.0;
    unit.normalize = false;
    const ComplexField p = make_datum(unit, c.grid);
    return d.normalize ? d.amplitude / l2_norm(p) : d.amplitude;
  }();
  const double norm0 = l2_norm(phi);

  VerificationReport rep;
  rep.identity = "Fourier transform, free propagator and its factorization";
  rep.grid = to_json(c.grid);

  const ComplexField r = random_smooth(c.grid, c.run["seed"].get<std::uint64_t>());
  {
    const double tol = c.run["roundtrip_tol"].get<double>();
    double rt = 0.0, pl = 0.0;
    for (const ComplexField* f : {&phi, &r}) {
      const ComplexField hat = forward_fourier(*f);
      rt = std::max(rt, rel(inverse_fourier(hat), *f));
      pl = std::max(pl, std::abs(l2_norm(hat) - l2_norm(*f)) / l2_norm(*f));
    }
    rep.add("fourier.roundtrip_relative_error", rt, tol);
    rep.add("fourier.plancherel_relative_error", pl, tol);
  }
  {
    Table t{"propagator", {"t", "relative_error"}, {}};
    double worst = 0.0;
    for (double tt : doubles(c.run["propagator_times"])) {
      const cplx z(alpha, tt);
      const cplx pref = std::pow(alpha / z, 0.5 * n);
      const ComplexField exact =
          ComplexField::sample(c.grid, Space::position, [&](std::span<const double> x) {
            cplx e = 0.0;
            for (int a = 0; a < n; ++a) {
              const double y = x[static_cast<std::size_t>(a)] - d.center - (a == 0 ? k * tt : 0.0);
              e -= y * y / (2.0 * z);
            }
            e += cplx(0.0, k * x[0] - 0.5 * k * k * tt);
            return scale * pref * std::exp(e);
          });
      const double err = l2_distance(free_propagate(phi, tt), exact) / norm0;
      worst = std::max(worst, err);
      t.rows.push_back({tt, err});
    }
    rep.tables.push_back(std::move(t));
    rep.add("propagator.max_relative_error", worst, c.run["propagator_tol"].get<double>());
  }
  {
    double worst = 0.0;
    for (const auto& pr : c.run["group_pairs"]) {
      const double s = pr[0].get<double>(), tt = pr[1].get<double>();
      worst = std::max(worst, rel(free_propagate(free_propagate(r, s), tt), free_propagate(r, s + tt)));
    }
    rep.add("group_law.max_relative_error", worst, c.run["group_tol"].get<double>());
  }
  {
    Table t{"factorization", {"t", "relative_error"}, {}};
    double worst = 0.0;
    for (double tt : doubles(c.run["factorization_times"])) {
      const double err =
          l2_distance(factorized_free_propagate(phi, tt, c.grid), free_propagate(phi, tt)) / norm0;
      worst = std::max(worst, err);
      t.rows.push_back({tt, err});
    }
    rep.tables.push_back(std::move(t));
    rep.add("factorization.max_relative_error", worst, c.run["factorization_tol"].get<double>());
  }
  return rep;
}

VerificationReport run_convergence(const ExperimentConfig& c, Fields) {
  const ComplexField u0 = make_datum(c.datum, c.grid);
  const json& r = c.run;
  VerificationReport rep;
  rep.identity = "time-stepping conservation and order";
  rep.grid = to_json(c.grid);
  rep.params = {{"nls", {{"dim", c.equation.dim}, {"sigma", c.equation.sigma}, {"mu", c.equation.mu}}},
                {"dnls_lambda", c.lambda}};

  {
    StepControl s = c.step;
    s.dt = r["mass_dt"].get<double>();
    const auto steps = r["mass_steps"].get<std::size_t>();
    const Evolution e = nls_evolve(u0, 0.0, static_cast<double>(steps) * s.dt, c.equation, s);
    rep.notes["mass_run_steps"] = e.health.steps;
    rep.add("split_step.mass_drift", e.health.mass_drift, r["mass_tol"].get<double>());
  }

  auto order = [&](const std::string& name, double dt, double divisor, auto&& solve) {
    const ComplexField ref = solve(dt / divisor);
    const double e1 = l2_distance(solve(dt), ref);
    const double e2 = l2_distance(solve(dt / 2), ref);
    rep.tables.push_back({name + ".order", {"dt", "error"}, {{dt, e1}, {dt / 2, e2}}});
    rep.fitted_rates.emplace_back(name + ".order", std::log2(e1 / e2));
    return e1 / e2;
  };
  const double t_end = r["order_t_end"].get<double>();

  const double q = order("split_step", r["order_dt"].get<double>(),
                         r["order_reference_divisor"].get<double>(), [&](double dt) {
                           StepControl s = c.step;
                           s.dt = dt;
                           return nls_evolve(u0, 0.0, t_end, c.equation, s).field;
                         });
  rep.add("split_step.halving_ratio", q, r["order_min"].get<double>(), Check::Kind::at_least);
  rep.add("split_step.halving_ratio", q, r["order_max"].get<double>());

  const DNLSParams dp{c.lambda};
  double worst_used = 1.0;
  double order_drift = 0.0;
  const double q4 = order("dnls_rk4", r["dnls_dt"].get<double>(),
                          r["dnls_reference_divisor"].get<double>(), [&](double dt) {
                            StepControl s = c.step;
                            s.dt = dt;
                            // Loose drift monitor: automatic halving would hide dt.
                            s.mass_drift_tol = 1e-3;
                            const Evolution e = dnls_evolve(u0, 0.0, t_end, dp, s);
                            worst_used = std::min(worst_used, e.health.dt_used / dt);
                            order_drift = std::max(order_drift, e.health.mass_drift);
                            return e.field;
                          });
  rep.add("dnls_rk4.halving_ratio", q4, r["dnls_order_min"].get<double>(), Check::Kind::at_least);
  rep.add("dnls_rk4.halving_ratio", q4, r["dnls_order_max"].get<double>());
  rep.add("dnls_rk4.step_kept", worst_used, 1.0, Check::Kind::at_least);
  {
    StepControl s = c.step;
    s.dt = r["dnls_mass_dt"].get<double>();
    const Evolution e = dnls_evolve(u0, 0.0, t_end, dp, s);
    // Worst drift of every DNLS run above, the order runs included.
    rep.add("dnls_rk4.mass_drift", std::max(e.health.mass_drift, order_drift),
            r["dnls_mass_tol"].get<double>());
  }
  return rep;
}

VerificationReport dispatch(const ExperimentConfig& c, Fields fields);

// All numbers of the checks and tables of a report, in order.
std::vector<double> numbers(const VerificationReport& r) {
  std::vector<double> v;
  for (const Check& ch : r.checks) v.push_back(ch.value);
  for (const Table& t : r.tables) {
    for (const auto& row : t.rows) v.insert(v.end(), row.begin(), row.end());
  }
  return v;
}

VerificationReport run_determinism(const ExperimentConfig& c, Fields) {
  const Experiment inner = parse_experiment(c.run["experiment"].get<std::string>());
  json user = c.resolved;
  user.erase("run");
  user["experiment"] = to_string(inner);
  user["quadrature"]["parallel"] = false;
  const ExperimentConfig seq = parse_config(inner, user);
  user["quadrature"]["parallel"] = true;
  const ExperimentConfig par = parse_config(inner, user);

  const VerificationReport a = dispatch(seq, nullptr);
  const VerificationReport b = dispatch(seq, nullptr);
  const VerificationReport p = dispatch(par, nullptr);
  const std::string da = report_document(seq, a, false).dump();
  const std::string db = report_document(seq, b, false).dump();

  const std::vector<double> na = numbers(a), np = numbers(p);
  double worst = na.size() == np.size() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::min(na.size(), np.size()); ++i) {
    const double s = std::max(std::abs(na[i]), std::abs(np[i]));
    if (s > 0.0) worst = std::max(worst, std::abs(na[i] - np[i]) / s);
  }

  VerificationReport rep;
  rep.identity = "repeatability and parallel panels";
  rep.params = {{"inner_experiment", to_string(inner)}, {"compared_numbers", na.size()}};
  rep.grid = to_json(c.grid);
  rep.add("repeat_reports_identical", da == db ? 1.0 : 0.0, 1.0, Check::Kind::at_least);
  rep.add("parallel_max_relative_difference", worst, c.run["parallel_tol"].get<double>());
  rep.notes["report_bytes"] = da.size();
  rep.notes["inner_verdict"] = a.verdict() ? "pass" : "fail";
  return rep;
}

VerificationReport dispatch(const ExperimentConfig& c, Fields fields) {
  switch (c.experiment) {
    case Experiment::solve: return run_solve(c, fields);
    case Experiment::wave_op: return run_wave_op(c, fields);
    case Experiment::thm1: return run_thm1(c, fields);
    case Experiment::conjugation: return run_conjugation(c, fields);
    case Experiment::corollary2: return run_corollary2(c, fields);
    case Experiment::proposition: return run_proposition(c, fields);
    case Experiment::dnls_gauge: return run_dnls_gauge(c, fields);
    case Experiment::subcritical: return run_subcritical(c, fields);
    case Experiment::lemmas: return run_lemmas(c, fields);
    case Experiment::spectral: return run_spectral(c, fields);
    case Experiment::convergence: return run_convergence(c, fields);
    case Experiment::determinism: return run_determinism(c, fields);
  }
  throw std::logic_error("harness: unhandled experiment");
}

std::string file_part(const std::string& name) {
  std::string out = name;
  for (char& ch : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' ||
                    ch == '-' || ch == '+';
    if (!ok) ch = '_';
  }
  return out;
}

}  // namespace

VerificationReport run(const ExperimentConfig& config, std::vector<NamedField>* fields) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport rep = dispatch(config, fields);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

json report_document(const ExperimentConfig& config, const VerificationReport& report,
                     bool include_timing) {
  json doc;
  doc["experiment"] = to_string(config.experiment);
  doc["config"] = config.resolved;
  const json body = report.to_json(include_timing);
  for (const auto& el : body.items()) doc[el.key()] = el.value();
  return doc;
}

WrittenFiles write_outputs(const ExperimentConfig& config, const VerificationReport& report,
                           const std::vector<NamedField>& fields,
                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = to_string(config.experiment);
  WrittenFiles out;
  out.report = dir / (stem + ".json");
  {
    std::ofstream os(out.report);
    os << report_document(config, report).dump(2) << '\n';
    if (!os) throw std::runtime_error("harness: cannot write " + out.report.string());
  }
  for (const Table& t : report.tables) {
    const auto path = dir / (stem + "." + file_part(t.name) + ".csv");
    std::ofstream os(path);
    os << report.table_csv(t);
    if (!os) throw std::runtime_error("harness: cannot write " + path.string());
    out.tables.push_back(path);
  }
  if (config.write_snapshots) {
    for (const NamedField& f : fields) {
      const auto path = dir / (stem + "." + file_part(f.name) + ".nlsf");
      write_snapshot(path, f.field);
      out.snapshots.push_back(path);
    }
  }
  return out;
}

}  // namespace nlslab
