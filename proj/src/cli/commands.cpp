#include "qkdfinite/cli/commands.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <string>
#include <vector>

#include "qkdfinite/cli/csv.hpp"
#include "qkdfinite/cli/drift_validation.hpp"
#include "qkdfinite/entropy.hpp"
#include "qkdfinite/optimize.hpp"
#include "qkdfinite/random.hpp"

namespace qkdfinite::cli {
namespace {

using json = nlohmann::json;

constexpr double kMaxCount = 9007199254740992.0;  // 2^53
constexpr double kDegree = std::numbers::pi / 180.0;
constexpr double kFig3ConstantTheta = kDegree * 1e-10;
constexpr double kFig3WalkTheta = kDegree * 1e-5;
constexpr const char* kWorkersEnv = "QKDFINITE_WORKERS";

struct UsageError {
  std::string flag;
  std::string message;
};

struct Options {
  std::string protocol = "rfi";
  std::string bound = "postselection";
  std::string drift = "fixed";
  double n = 1e10;
  double n_min = 1e4;
  double n_max = 1e14;
  int points = 41;
  double q = 0.05;
  double c0 = 1.72;
  double theta_step = 0.0;
  double eps_coh = 1e-5;
  double eps_ec = 1e-10;
  double pz = 0.5;
  bool pz_set = false;
  std::uint64_t seed = 1;
  double trials = 1e5;
  std::string out;
  int grid_points = SearchConfig{}.grid_points_per_dim;
  int refine_rounds = SearchConfig{}.refinement_rounds;
  int multistart = SearchConfig{}.multistart_count;
  double tolerance = SearchConfig{}.tolerance;
};

std::uint64_t to_count(double value, const char* flag) {
  if (!(value >= 1.0) || value > kMaxCount || std::floor(value) != value) {
    throw UsageError{flag, "must be an integer in [1, 2^53], got " +
                               format_real(value)};
  }
  return static_cast<std::uint64_t>(value);
}

LogEpsilon to_epsilon(double value, const char* flag) {
  if (!(value > 0.0) || value > 1.0) {
    throw UsageError{flag, "must lie in (0, 1], got " + format_real(value)};
  }
  return LogEpsilon::from_epsilon(value);
}

SearchConfig search_config(const Options& o) {
  SearchConfig cfg;
  cfg.grid_points_per_dim = o.grid_points;
  cfg.refinement_rounds = o.refine_rounds;
  cfg.multistart_count = o.multistart;
  cfg.seed = o.seed;
  cfg.tolerance = o.tolerance;
  if (cfg.grid_points_per_dim < 3) throw UsageError{"--grid-points", "must be >= 3"};
  if (cfg.refinement_rounds < 1) throw UsageError{"--refine-rounds", "must be >= 1"};
  if (cfg.multistart_count < 1) throw UsageError{"--multistart", "must be >= 1"};
  if (!(cfg.tolerance > 0.0)) throw UsageError{"--tolerance", "must be > 0"};
  return cfg;
}

Scenario scenario_from(const Options& o) {
  Scenario s;
  s.protocol = parse_protocol(o.protocol);
  s.bound = parse_bound_mode(o.bound);
  s.qber = o.q;
  s.c0 = o.c0;
  if (s.protocol == Protocol::kRfi && !(o.q >= 0.0 && o.q <= kEveInfoMaxQber)) {
    throw UsageError{"--q", "RFI bound holds only for 0 <= Q <= 0.159, got " +
                                format_real(o.q)};
  }
  if (s.protocol == Protocol::kBb84 && !(o.q >= 0.0 && o.q < 0.5)) {
    throw UsageError{"--q", "BB84 QBER must lie in [0, 0.5), got " + format_real(o.q)};
  }
  if (!(o.c0 >= 0.0 && o.c0 <= 2.0)) {
    throw UsageError{"--c0", "must lie in [0, 2], got " + format_real(o.c0)};
  }
  try {
    s.drift = DriftModel::parse(o.drift, o.theta_step);
  } catch (const Error& e) {
    throw UsageError{"--theta-step", e.what()};
  }
  s.eps_security = to_epsilon(o.eps_coh, "--eps-coh");
  s.eps_ec = to_epsilon(o.eps_ec, "--eps-ec");
  if (o.pz_set) {
    if (!(o.pz > 0.0 && o.pz < 1.0)) {
      throw UsageError{"--pz", "must lie in (0, 1), got " + format_real(o.pz)};
    }
    s.fixed_p_z = o.pz;
  }
  return s;
}

std::vector<std::uint64_t> n_grid(const Options& o) {
  const std::uint64_t lo = to_count(o.n_min, "--n-min");
  const std::uint64_t hi = to_count(o.n_max, "--n-max");
  if (lo >= hi) throw UsageError{"--n-max", "must exceed --n-min"};
  if (o.points < 2) throw UsageError{"--points", "must be >= 2"};
  return log_grid(lo, hi, o.points);
}

unsigned workers_from_env() {
  const char* text = std::getenv(kWorkersEnv);
  if (text == nullptr) return 0;
  char* end = nullptr;
  const unsigned long value = std::strtoul(text, &end, 10);
  return (end != text && *end == '\0') ? static_cast<unsigned>(value) : 0;
}

json parameters_json(const Options& o) {
  json p = {{"protocol", o.protocol},     {"bound", o.bound},
            {"drift", o.drift},           {"N", o.n},
            {"n-min", o.n_min},           {"n-max", o.n_max},
            {"points", o.points},         {"q", o.q},
            {"c0", o.c0},                 {"theta-step", o.theta_step},
            {"eps-coh", o.eps_coh},       {"eps-ec", o.eps_ec},
            {"seed", o.seed},             {"trials", o.trials},
            {"grid-points", o.grid_points}, {"refine-rounds", o.refine_rounds},
            {"multistart", o.multistart}, {"tolerance", o.tolerance}};
  if (o.pz_set) p["pz"] = o.pz;
  return p;
}

json base_manifest(const std::string& command, const Options& o) {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return {{"tool", "qkdfinite"},
          {"version", QKDFINITE_VERSION},
          {"command", command},
          {"parameters", parameters_json(o)},
          {"seed", o.seed},
          {"rng", std::string(SplitMix64::kAlgorithm)},
          {"timestamp", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now))}};
}

// Writes the table and its manifest. Returns false on I/O failure.
bool emit(const Options& o, const std::string& csv, json manifest,
          std::ostream& out, std::ostream& err) {
  if (o.out.empty()) {
    out << csv;
    manifest["output"] = "stdout";
    err << manifest.dump() << '\n';
    return static_cast<bool>(out);
  }
  manifest["output"] = o.out;
  std::ofstream table(o.out, std::ios::binary);
  table << csv;
  table.close();
  std::ofstream meta(o.out + ".manifest.json", std::ios::binary);
  meta << manifest.dump(2) << '\n';
  meta.close();
  if (!table || !meta) {
    err << "error: cannot write output '" << o.out << "'\n";
    return false;
  }
  return true;
}

int finish(const Options& o, const std::string& csv, json manifest, int code,
           std::ostream& out, std::ostream& err) {
  manifest["exit_code"] = code;
  return emit(o, csv, std::move(manifest), out, err) ? code : kExitIoFailure;
}

int cmd_rate(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario scenario = scenario_from(o);
  const SearchConfig cfg = search_config(o);
  const std::uint64_t n = to_count(o.n, "--N");
  const OptResult result = optimize_rate(scenario, n, cfg);
  const std::string status = row_status(result);

  json manifest = base_manifest("rate", o);
  manifest["status"] = status;
  manifest["evaluations"] = result.evaluations;
  const int code = result.feasible && result.breakdown.r_raw > 0.0
                       ? kExitOk
                       : kExitNonPositiveRate;
  return finish(o, result_header() + result_row(scenario, result, status),
                std::move(manifest), code, out, err);
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario scenario = scenario_from(o);
  const SearchConfig cfg = search_config(o);
  const std::vector<std::uint64_t> grid = n_grid(o);
  const std::vector<SweepRow> rows = sweep_n(grid, scenario, cfg, workers_from_env());

  std::string csv = result_header();
  json statuses = json::array();
  for (const SweepRow& row : rows) {
    csv += row.result ? result_row(scenario, *row.result, row.status)
                      : failed_row(scenario, row.n_signals, row.status);
    statuses.push_back(row.status);
  }
  json manifest = base_manifest("sweep", o);
  manifest["status"] = statuses;
  return finish(o, csv, std::move(manifest), kExitOk, out, err);
}

int cmd_optimal_n(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario scenario = scenario_from(o);
  const SearchConfig cfg = search_config(o);
  const std::uint64_t lo = to_count(o.n_min, "--n-min");
  const std::uint64_t hi = to_count(o.n_max, "--n-max");
  if (lo >= hi) throw UsageError{"--n-max", "must exceed --n-min"};

  OptResult result;
  try {
    result = optimal_block_size(lo, hi, scenario, cfg, workers_from_env());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNoPositiveRate) throw;
    err << "error: " << e.what() << '\n';
    json manifest = base_manifest("optimal-n", o);
    manifest["status"] = std::string(to_string(e.kind()));
    return finish(o, result_header(), std::move(manifest), kExitNonPositiveRate,
                  out, err);
  }
  const std::string status = result.at_boundary ? "boundary" : "optimal";
  json manifest = base_manifest("optimal-n", o);
  manifest["status"] = status;
  manifest["n_star"] = *result.n_star;
  return finish(o, result_header() + result_row(scenario, result, status),
                std::move(manifest), kExitOk, out, err);
}

int cmd_validate_drift(const Options& o, std::ostream& out, std::ostream& err) {
  const std::uint64_t trials = to_count(o.trials, "--trials");
  const std::vector<DriftCheck> checks =
      run_drift_validation(trials, o.seed, workers_from_env());

  std::string csv = "check,worst,tolerance,passed\n";
  bool all = true;
  json statuses = json::object();
  for (const DriftCheck& c : checks) {
    csv += join_row({c.name, format_real(c.worst), format_real(c.tolerance),
                     c.passed ? "true" : "false"});
    statuses[c.name] = c.passed ? "pass" : "fail";
    all = all && c.passed;
  }
  json manifest = base_manifest("validate-drift", o);
  manifest["status"] = statuses;
  return finish(o, csv, std::move(manifest),
                all ? kExitOk : kExitValidationFailure, out, err);
}

// r per N for several scenarios side by side; infeasible points read 0.
std::string comparison_table(const std::vector<std::string>& names,
                             const std::vector<Scenario>& scenarios,
                             const std::vector<std::uint64_t>& grid,
                             const SearchConfig& cfg) {
  std::vector<std::vector<SweepRow>> columns;
  for (const Scenario& s : scenarios) {
    columns.push_back(sweep_n(grid, s, cfg, workers_from_env()));
  }
  std::vector<std::string> header = {"N"};
  header.insert(header.end(), names.begin(), names.end());
  std::string csv = join_row(header);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> fields = {std::to_string(grid[i])};
    for (const auto& column : columns) {
      const auto& row = column[i];
      fields.push_back(format_real(row.result ? row.result->r_star : 0.0));
    }
    csv += join_row(fields);
  }
  return csv;
}

int cmd_fig2(Options o, std::ostream& out, std::ostream& err) {
  o.protocol = "bb84";
  o.drift = "fixed";
  o.theta_step = 0.0;
  const SearchConfig cfg = search_config(o);
  const std::vector<std::uint64_t> grid = n_grid(o);
  std::vector<Scenario> scenarios;
  for (const char* bound : {"collective", "postselection", "definetti"}) {
    o.bound = bound;
    scenarios.push_back(scenario_from(o));
  }
  const std::string csv = comparison_table(
      {"r_collective", "r_postselection", "r_definetti"}, scenarios, grid, cfg);
  json manifest = base_manifest("fig2", o);
  manifest["parameters"].erase("bound");
  manifest["reconstruction"] = true;
  manifest["status"] = "ok";
  return finish(o, csv, std::move(manifest), kExitOk, out, err);
}

int cmd_fig3(Options o, std::ostream& out, std::ostream& err) {
  o.protocol = "rfi";
  o.bound = "postselection";
  const SearchConfig cfg = search_config(o);
  const std::vector<std::uint64_t> grid = n_grid(o);
  std::vector<Scenario> scenarios;
  for (auto [drift, theta] : {std::pair{"constant", kFig3ConstantTheta},
                              std::pair{"fixed", 0.0},
                              std::pair{"walk", kFig3WalkTheta}}) {
    o.drift = drift;
    o.theta_step = theta;
    scenarios.push_back(scenario_from(o));
  }
  const std::string csv = comparison_table(
      {"r_constant_drift", "r_fixed", "r_random_walk"}, scenarios, grid, cfg);
  json manifest = base_manifest("fig3", o);
  manifest["parameters"].erase("drift");
  manifest["parameters"].erase("theta-step");
  manifest["drift_rates"] = {{"constant", kFig3ConstantTheta},
                             {"walk", kFig3WalkTheta}};
  manifest["status"] = "ok";
  return finish(o, csv, std::move(manifest), kExitOk, out, err);
}

void add_shared_options(CLI::App& app, Options& o, CLI::Option*& pz) {
  app.add_option("--protocol", o.protocol, "bb84 | rfi")
      ->check(CLI::IsMember({"bb84", "rfi"}));
  app.add_option("--bound", o.bound, "collective | postselection | definetti")
      ->check(CLI::IsMember({"collective", "postselection", "definetti"}));
  app.add_option("--N", o.n, "Number of received signals");
  app.add_option("--n-min", o.n_min, "Smallest N of a sweep or bracket");
  app.add_option("--n-max", o.n_max, "Largest N of a sweep or bracket");
  app.add_option("--points", o.points, "Log-spaced N grid size");
  app.add_option("--q", o.q, "Observed QBER");
  app.add_option("--c0", o.c0, "Initial correlation C(0) (RFI)");
  app.add_option("--drift", o.drift, "fixed | constant | walk")
      ->check(CLI::IsMember({"fixed", "constant", "walk"}));
  app.add_option("--theta-step", o.theta_step, "Frame drift per signal [rad]");
  app.add_option("--eps-coh", o.eps_coh,
                 "Security parameter (eps_col for the collective bound)");
  app.add_option("--eps-ec", o.eps_ec, "Error-correction failure probability");
  pz = app.add_option("--pz", o.pz, "Fix the key-basis probability p_Z");
  app.add_option("--seed", o.seed, "Seed for searches and Monte Carlo");
  app.add_option("--trials", o.trials, "Monte Carlo walks (validate-drift)");
  app.add_option("--out", o.out, "CSV output path (default: stdout)");
  app.add_option("--grid-points", o.grid_points, "Coarse grid points per axis");
  app.add_option("--refine-rounds", o.refine_rounds, "Pattern-search rounds");
  app.add_option("--multistart", o.multistart, "Refinement starting points");
  app.add_option("--tolerance", o.tolerance, "Relative search resolution");
  app.set_config("--config", "", "Flat key = value file; flags take precedence");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-key secret key fractions for discrete-variable QKD",
               "qkdfinite"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  Options o;
  CLI::Option* pz = nullptr;
  add_shared_options(app, o, pz);

  struct Command {
    const char* name;
    const char* help;
  };
  const std::vector<Command> commands = {
      {"rate", "Optimized rate at a single N (one CSV row)"},
      {"sweep", "Optimized rate over a log-spaced N grid"},
      {"optimal-n", "Block size maximizing the rate under drift"},
      {"validate-drift", "Check drift closed forms against brute force"},
      {"fig2", "BB84: collective vs post-selection vs de Finetti"},
      {"fig3", "RFI: constant drift, fixed frames, random walk"},
  };
  for (const Command& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  o.pz_set = pz->count() > 0;

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "rate") return cmd_rate(o, out, err);
    if (command == "sweep") return cmd_sweep(o, out, err);
    if (command == "optimal-n") return cmd_optimal_n(o, out, err);
    if (command == "validate-drift") return cmd_validate_drift(o, out, err);
    if (command == "fig2") return cmd_fig2(o, out, err);
    return cmd_fig3(o, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.flag << ": " << e.message << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInvalidInput;
}

}  // namespace qkdfinite::cli
