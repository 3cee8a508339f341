#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlslab/born.hpp"
#include "nlslab/field.hpp"
#include "nlslab/report.hpp"
#include "nlslab/scattering.hpp"
#include "nlslab/solvers.hpp"

namespace nlslab {

enum class Experiment {
  solve,
  wave_op,
  thm1,
  conjugation,
  corollary2,
  proposition,
  dnls_gauge,
  subcritical,
  lemmas,
  spectral,
  convergence,
  determinism,
};

const std::vector<Experiment>& all_experiments();
const char* to_string(Experiment e);
// Throws ConfigError for an unknown name.
Experiment parse_experiment(const std::string& name);

struct DatumSpec {
  enum class Kind { gaussian, modulated_gaussian, sech, file };
  Kind kind = Kind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;      // applied on every axis
  double wavenumber = 0.0;  // along axis 0; ignored by gaussian
  // Scale the profile to unit L² norm before multiplying by the amplitude.
  bool normalize = false;
  std::filesystem::path path;  // kind == file
};

// gaussian            a e^{−|x−c|²/(2w²)}
// modulated_gaussian  a e^{−|x−c|²/(2w²)} e^{ik x₀}
// sech                a sech(|x−c|/w) e^{ik x₀}
// file                snapshot from path; its grid must equal grid
// Throws NumericalError("harness") when more than 1e-6 of the mass sits in the
// edge band or the spectral tail of grid, ConfigError for a missing file or a
// grid mismatch.
ComplexField make_datum(const DatumSpec& spec, const GridDescriptor& grid);

struct ExperimentConfig {
  Experiment experiment = Experiment::solve;
  json resolved;  // the whole configuration with every default filled in
  GridDescriptor grid;
  NLSParams equation;
  double lambda = 1.0;
  DatumSpec datum;
  StepControl step;
  ScatteringConfig scattering;
  QuadratureSpec quadrature;
  bool write_snapshots = false;
  json run;  // experiment-specific parameters, same as resolved["run"]
};

// The defaults of one experiment; every physics default lives here.
json default_config(Experiment e);
// Overlays user on default_config(e). Unknown keys, wrong types and invalid
// values raise ConfigError. A "experiment" entry in user must name e.
ExperimentConfig parse_config(Experiment e, const json& user);
ExperimentConfig load_config(Experiment e, const std::filesystem::path& path);

struct NamedField {
  std::string name;
  ComplexField field;
};

// Dispatches to the experiment. Fields worth keeping as snapshots are
// appended to fields when it is non-null.
VerificationReport run(const ExperimentConfig& config, std::vector<NamedField>* fields = nullptr);

// {"experiment", "config", <report>}; without timing the document is a pure
// function of the configuration.
json report_document(const ExperimentConfig& config, const VerificationReport& report,
                     bool include_timing = true);

struct WrittenFiles {
  std::filesystem::path report;
  std::vector<std::filesystem::path> tables;
  std::vector<std::filesystem::path> snapshots;
};

// <dir>/<experiment>.json, <dir>/<experiment>.<table>.csv and, when enabled,
// <dir>/<experiment>.<field>.nlsf.
WrittenFiles write_outputs(const ExperimentConfig& config, const VerificationReport& report,
                           const std::vector<NamedField>& fields,
                           const std::filesystem::path& dir);

}  // namespace nlslab
