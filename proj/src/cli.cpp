#include "fbmr/cli.hpp"

#include <sstream>

#include <CLI11.hpp>

#include "fbmr/config.hpp"
#include "fbmr/constants.hpp"
#include "fbmr/errors.hpp"
#include "fbmr/parallel.hpp"
#include "fbmr/report.hpp"

namespace fbmr {

namespace {

std::string simulate_csv(const ExperimentConfig& config)
{
  GridSpec grid{config.resolved_hurst(), config.n_values.front(), config.horizon};
  grid.validate();
  std::ostringstream os;
  sample_paths(grid, config.paths, config.seed, config.method, config.threads).write_csv(os);
  return os.str();
}

ExperimentReport dispatch(const ExperimentConfig& config)
{
  const std::string& e = config.experiment;
  if (e == "verify-clt") return power_sum_clt_experiment(config);
  if (e == "verify-limit") return limit_law_experiment(config);
  if (e == "verify-lemmas") return lemma_scan_experiment(config);
  if (e == "verify-residual") return residual_decay_experiment(config);
  if (e == "riemann") return riemann_experiment(config);
  throw ConfigError("unknown experiment '" + e + "'");
}

void emit(const CliInvocation& inv, const std::string& text, std::ostream& out)
{
  if (inv.output_path.empty()) out << text;
  else write_atomically(inv.output_path, text);
}

int run_constants(const CliInvocation& inv, std::ostream& out)
{
  std::vector<std::string> names = inv.measures;
  if (names.empty()) names = {"trapezoid", "simpson", "midpoint", "lebesgue"};
  std::vector<ConstantsRow> rows;
  for (const std::string& name : names) rows.push_back(constants_row(SymmetricMeasure::by_name(name)));
  emit(inv, render_constants(rows, output_format_from_string(inv.format.value_or("table"))), out);
  return 0;
}

}  // namespace

int run(const CliInvocation& inv, std::ostream& out, std::ostream& err)
{
  try {
    if (inv.subcommand == "constants") return run_constants(inv, out);

    if (inv.config_path.empty()) throw ConfigError("--config is required");
    const std::string requested = inv.subcommand == "run" ? "" : inv.subcommand;
    ExperimentConfig config = parse_config(read_json_file(inv.config_path), requested);
    if (config.experiment.empty()) throw ConfigError("config does not name an experiment");
    if (inv.seed) config.seed = *inv.seed;
    config.threads = inv.threads.value_or(default_thread_count());
    if (config.threads == 0) throw ConfigError("thread count must be positive");

    const std::vector<std::string> problems = config_diagnostics(config);
    if (!problems.empty()) {
      for (const std::string& p : problems) err << "config error: " << p << '\n';
      return 1;
    }

    if (config.experiment == "simulate") {
      if (inv.format && *inv.format != "csv") throw ConfigError("simulate writes CSV only");
      emit(inv, simulate_csv(config), out);
      return 0;
    }
    const ExperimentReport report = dispatch(config);
    emit(inv, render_report(report, output_format_from_string(inv.format.value_or("json"))), out);
    return 0;
  } catch (const ControlFailure& e) {
    err << "control failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Symmetric Riemann sums of fractional Brownian motion: constants, simulation and verification"};
  app.require_subcommand(1);
  CliInvocation inv;

  auto* constants = app.add_subcommand("constants", "Print ell, k, sigma^2, oracle variance and c_nu");
  constants->add_option("--measure", inv.measures, "Built-in measure (repeatable)");
  constants->add_option("--format", inv.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  constants->add_option("-o,--output", inv.output_path, "Output file");

  const std::vector<std::pair<std::string, std::string>> experiments{
      {"simulate", "Dump sampled paths as CSV"},
      {"riemann", "Summarize decomposition terms over sampled paths"},
      {"verify-clt", "Power-sum CLT at the critical H"},
      {"verify-limit", "Change-of-variable formula in law"},
      {"verify-lemmas", "Lemma bound scans"},
      {"verify-residual", "Decay of the Taylor remainder"},
      {"run", "Run the experiment named in the config"}};
  for (const auto& [name, help] : experiments) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", inv.config_path, "Config JSON")->required();
    sub->add_option("-o,--output", inv.output_path, "Output file (stdout if omitted)");
    sub->add_option("--format", inv.format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
    sub->add_option("--seed", inv.seed, "Seed override");
    sub->add_option("--threads", inv.threads, "Worker threads (default FBMR_THREADS or 1)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? 0 : 1;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();
  return run(inv, out, err);
}

}  // namespace fbmr
