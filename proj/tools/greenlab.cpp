// greenlab command-line front end.
//
//   greenlab <verb> [--preset NAME] [--config FILE] [--out DIR] [--seed N]
//                   [--threads N] [key=value ...]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "greenlab/config.hpp"
#include "greenlab/errors.hpp"
#include "greenlab/experiments.hpp"

namespace {

using namespace greenlab;

struct Options {
  std::string preset;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = -1;
  std::vector<std::string> overrides;
};

ExperimentConfig build_config(const Options& o, CLI::App& app) {
  ExperimentConfig cfg = o.preset.empty() ? ExperimentConfig{} : preset(o.preset);
  if (!o.config.empty()) cfg = load_config(o.config, cfg);
  for (const auto& a : o.overrides) apply_override(cfg, a);
  if (!o.out.empty()) cfg.out = o.out;
  if (app.count("--seed")) cfg.seed = o.seed;
  if (o.threads >= 0) cfg.threads = o.threads;
  return cfg;
}

void print_summary(const VerificationReport& rep, const std::string& path) {
  for (const auto& c : rep.checks)
    std::printf("%s  %s\n", c.verdict ? "PASS" : "FAIL", c.name.c_str());
  std::printf("%s: %zu checks, report %s\n", rep.verdict() ? "pass" : "fail", rep.checks.size(), path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green function verification suite for periodic divergence-form operators"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::pair<std::string, std::string>> verbs{
      {"field-info", "coercivity and periodicity of the configured fields"},
      {"solve", "Green columns and the dense-oracle comparison"},
      {"decay", "decay exponents and ratio checks"},
      {"lorentz", "weak-Lebesgue norm sandwich suite"},
      {"lift", "dimension lifting from the 3D slab operator"},
      {"verify", "run the experiments selected by the config or preset"},
      {"dump", "write Green columns or derived fields as CSV"}};
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--preset", opt.preset, "named preset")->check([](const std::string& s) {
      const auto names = preset_names();
      return std::find(names.begin(), names.end(), s) == names.end() ? "unknown preset '" + s + "'" : std::string();
    });
    sub->add_option("--config", opt.config, "key = value config file");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--threads", opt.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    sub->add_option("overrides", opt.overrides, "key=value config overrides");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig cfg = build_config(opt, *app.get_subcommands().front());
    if (verb == "solve") cfg.experiments = {Experiment::solve};
    else if (verb == "decay") cfg.experiments = {Experiment::decay};
    else if (verb == "lorentz") cfg.experiments = {Experiment::lorentz};
    else if (verb == "lift") cfg.experiments = {Experiment::lift};
    validate(cfg);
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

    VerificationReport rep;
    if (verb == "field-info") {
      rep.name = cfg.name + "-field-info";
      rep.config = Json(to_map(cfg));
      rep.checks = field_info(cfg);
      rep.runtime = Json{{"threads", omp_get_max_threads()}};
    } else if (verb == "dump") {
      rep = dump(cfg);
    } else {
      rep = run(cfg);
    }
    const auto path = write_report(rep, cfg.out);
    print_summary(rep, path.string());
    return exit_code(rep);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const NonCoerciveError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const SourcePlacementError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
