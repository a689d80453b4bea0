#include "qkdfinite/cli/csv.hpp"

#include <fmt/format.h>

namespace qkdfinite::cli {
namespace {

std::string optional_real(const std::optional<double>& value) {
  return value ? format_real(*value) : std::string();
}

std::vector<std::string> scenario_fields(const Scenario& scenario,
                                         std::uint64_t n_signals) {
  return {std::to_string(n_signals), std::string(to_string(scenario.protocol)),
          std::string(to_string(scenario.bound)),
          std::string(to_string(scenario.drift.kind())),
          format_real(scenario.drift.theta_step())};
}

}  // namespace

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

const std::vector<std::string_view>& result_columns() {
  static const std::vector<std::string_view> columns = {
      "N",      "protocol", "bound",   "drift_model", "theta_step",
      "r_raw",  "r",        "p_z",     "w_pa",        "w_bar",
      "w_pe",   "w_def",    "m",       "k",           "q_obs",
      "c_obs",  "q_prime",  "c_prime", "log2_inv_eps_col", "status"};
  return columns;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += fields[i];
  }
  line += '\n';
  return line;
}

std::string result_header() {
  std::vector<std::string> names(result_columns().begin(), result_columns().end());
  return join_row(names);
}

std::string result_row(const Scenario& scenario, const OptResult& result,
                       std::string_view status) {
  std::vector<std::string> f = scenario_fields(scenario, result.n_signals);
  if (!result.feasible) {
    f.insert(f.end(), {"", format_real(0.0), "", "", "", "", "", "", "",
                       format_real(result.q_observed),
                       optional_real(result.c_observed), "", "", "",
                       std::string(status)});
    return join_row(f);
  }
  const RateBreakdown& b = result.breakdown;
  const PointParams& p = result.params;
  f.push_back(format_real(b.r_raw));
  f.push_back(format_real(b.r));
  f.push_back(format_real(p.p_z));
  f.push_back(format_real(p.weights.pa));
  f.push_back(format_real(p.weights.bar));
  f.push_back(format_real(p.weights.pe));
  f.push_back(optional_real(p.weights.def));
  f.push_back(p.split ? std::to_string(p.split->m) : std::string());
  f.push_back(p.split ? std::to_string(p.split->k) : std::string());
  f.push_back(format_real(result.q_observed));
  f.push_back(optional_real(result.c_observed));
  f.push_back(format_real(b.evaluation.q_prime));
  f.push_back(optional_real(b.evaluation.c_prime));
  f.push_back(format_real(b.eps_col.log2_inv()));
  f.push_back(std::string(status));
  return join_row(f);
}

std::string failed_row(const Scenario& scenario, std::uint64_t n_signals,
                       std::string_view status) {
  std::vector<std::string> f = scenario_fields(scenario, n_signals);
  f.resize(result_columns().size() - 1);
  f.push_back(std::string(status));
  return join_row(f);
}

}  // namespace qkdfinite::cli
