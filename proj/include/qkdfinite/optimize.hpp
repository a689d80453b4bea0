#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkdfinite/drift.hpp"
#include "qkdfinite/epsilon_budget.hpp"
#include "qkdfinite/rates.hpp"

namespace qkdfinite {

struct SearchConfig {
  int grid_points_per_dim = 7;
  int refinement_rounds = 80;
  int multistart_count = 4;
  std::uint64_t seed = 1;
  // Relative (to each axis span) step size at which refinement stops.
  double tolerance = 1e-9;

  void validate() const;
};

// Everything about a run except N and the searched parameters.
struct Scenario {
  Protocol protocol = Protocol::kRfi;
  BoundMode bound = BoundMode::kPostselection;
  double qber = 0.05;
  double c0 = 2.0;  // initial correlation, RFI only
  DriftModel drift = DriftModel::fixed();
  LogEpsilon eps_security;  // eps_col (collective) or eps_coh
  LogEpsilon eps_ec;
  std::optional<double> fixed_p_z;
  int signal_dim = 2;

  void validate() const;
};

struct OptResult {
  double r_star = 0.0;  // == breakdown.r
  RateBreakdown breakdown;
  PointParams params;
  std::uint64_t n_signals = 0;
  std::optional<std::uint64_t> n_star;  // set by optimal_block_size
  std::uint64_t evaluations = 0;
  bool feasible = false;  // false: no point of the search space evaluated
  bool at_boundary = false;
  double q_observed = 0.0;
  std::optional<double> c_observed;  // smeared C seen at this N (RFI)
};

// Search bounds. p_Z is searched as log10(1 - p_Z), weights as log10 ratios
// to w_PE, de Finetti m and k as log10 fractions of N_s.
inline constexpr double kLog10OneMinusPzMin = -4.0;
inline constexpr double kPzMin = 0.05;
inline constexpr double kLog10WeightRatioSpan = 6.0;
inline constexpr double kLog10SplitFractionMin = -9.0;
inline constexpr double kSplitFractionMax = 0.45;
inline constexpr int kBlockSizeScanPoints = 64;

// Observation at N: the C0 of the scenario smeared by its drift model.
ProtocolInput observation_at(const Scenario& scenario, std::uint64_t n_signals);

// Maximizes r_raw over p_Z, the weight simplex and (de Finetti) m, k:
// a coarse half-open grid (nested under doubling), then pattern-search refinement from the best coarse points
// and from seeded random points. Points that raise a library Error are
// infeasible and skipped.
OptResult optimize_rate(const Scenario& scenario, std::uint64_t n_signals,
                        const SearchConfig& cfg);

struct SweepRow {
  std::uint64_t n_signals = 0;
  std::optional<OptResult> result;
  std::string status;  // ok | nonpositive | infeasible | <error kind>
};

// One optimize_rate per grid entry; rows come back in grid order. `grid`
// must be strictly increasing. workers = 0 uses hardware concurrency.
std::vector<SweepRow> sweep_n(std::span<const std::uint64_t> grid,
                              const Scenario& scenario, const SearchConfig& cfg,
                              unsigned workers = 0);

// Block size N in [n_min, n_max] maximizing the optimized rate: golden
// section on log N, cross-checked against a 64-point log scan. Fixed frames
// report n_max with at_boundary set. Throws kNoPositiveRate when the rate is
// zero across the bracket.
OptResult optimal_block_size(std::uint64_t n_min, std::uint64_t n_max,
                             const Scenario& scenario, const SearchConfig& cfg,
                             unsigned workers = 0);

// `points` log-spaced integers from lo to hi inclusive, deduplicated.
std::vector<std::uint64_t> log_grid(std::uint64_t lo, std::uint64_t hi,
                                    int points);

std::string row_status(const OptResult& result);

}  // namespace qkdfinite
