// nlslab <experiment> --config <path> [--out <dir>] [--parallel]
//
// Exit status: 0 when every check passes, 1 on a failed check or a numerical
// error, 2 on a configuration error.
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nlslab/error.hpp"
#include "nlslab/harness.hpp"

using namespace nlslab;

namespace {

void print_summary(const VerificationReport& rep, std::ostream& os) {
  os << rep.identity << '\n';
  for (const Check& c : rep.checks) {
    const char* rel = c.kind == Check::Kind::at_least ? ">=" : c.kind == Check::Kind::below ? "<" : "<=";
    os << "  " << (c.pass() ? "ok  " : "FAIL") << ' ' << c.name << " = " << std::setprecision(4)
       << c.value << "  (" << rel << ' ' << c.bound << ")\n";
  }
  for (const auto& [name, v] : rep.fitted_rates) os << "  rate " << name << " = " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NLS spectral simulation and verification lab"};
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  bool parallel = false;
  bool print_defaults = false;

  std::string names;
  for (Experiment e : all_experiments()) names += std::string(names.empty() ? "" : ", ") + to_string(e);
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", config_path, "JSON configuration; omitted keys take their defaults");
  app.add_option("--out", out_dir, "output directory (default: $NLSLAB_OUT, else ./nlslab_out)");
  app.add_flag("--parallel", parallel, "evaluate quadrature panels on several threads");
  app.add_flag("--print-defaults", print_defaults, "print the default configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Experiment e = parse_experiment(experiment);
    if (print_defaults) {
      std::cout << default_config(e).dump(2) << '\n';
      return 0;
    }
    json user = json::object();
    if (!config_path.empty()) user = load_config(e, config_path).resolved;
    if (parallel) user["quadrature"]["parallel"] = true;
    const ExperimentConfig config = parse_config(e, user);

    if (out_dir.empty()) {
      const char* env = std::getenv("NLSLAB_OUT");
      out_dir = env && *env ? env : "nlslab_out";
    }
    std::vector<NamedField> fields;
    const VerificationReport rep = run(config, &fields);
    const WrittenFiles files = write_outputs(config, rep, fields, out_dir);
    print_summary(rep, std::cout);
    std::cout << "report: " << files.report.string() << '\n';
    std::cout << "verdict: " << (rep.verdict() ? "pass" : "fail") << '\n';
    return rep.verdict() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error in " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
