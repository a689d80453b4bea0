#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "qkdfinite/log_epsilon.hpp"

namespace qkdfinite {

enum class BoundMode { kCollective, kPostselection, kDeFinetti };

std::string_view to_string(BoundMode mode);
BoundMode parse_bound_mode(std::string_view text);

// Fractions of the split total handed to privacy amplification, min-entropy
// smoothing, parameter estimation and (de Finetti only) the trace-out error.
struct BudgetWeights {
  double pa = 1.0 / 3.0;
  double bar = 1.0 / 3.0;
  double pe = 1.0 / 3.0;
  std::optional<double> def;
};

struct EpsilonBudget {
  LogEpsilon eps_col;  // total being split
  LogEpsilon eps_ec;   // requested error-correction failure probability
  BudgetWeights weights;
  int n_pe = 1;  // number of estimated parameters
};

// Per-phase failure probabilities after splitting.
//
// eps_col is divided by the weights; eps_ec is added on top of it and is
// capped at kEcSlack * eps_col, so the achieved total never exceeds
// eps_col by more than 1%.
struct ResolvedEpsilons {
  LogEpsilon total;
  LogEpsilon pa;
  LogEpsilon bar;
  LogEpsilon pe;
  LogEpsilon ec;
  std::optional<LogEpsilon> def;
  int n_pe = 1;
  bool ec_tightened = false;
  LogEpsilon achieved_total;  // total + ec
};

inline constexpr double kWeightSumTolerance = 1e-12;
inline constexpr double kEcSlack = 1e-2;

// log2(1/eps_col) = log2(1/eps_coh) + (d^4 - 1) log2(N + 1).
LogEpsilon collective_epsilon_from_coherent(LogEpsilon eps_coh,
                                            std::uint64_t n_signals,
                                            int signal_dim);

ResolvedEpsilons resolve_budget(const EpsilonBudget& budget, BoundMode mode);

// log2(2^-a + 2^-b) expressed as log2(1/(eps_a + eps_b)).
LogEpsilon log_epsilon_sum(LogEpsilon a, LogEpsilon b);

}  // namespace qkdfinite
