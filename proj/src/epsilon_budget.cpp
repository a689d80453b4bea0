#include "qkdfinite/epsilon_budget.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qkdfinite {

std::string_view to_string(BoundMode mode) {
  switch (mode) {
    case BoundMode::kCollective:
      return "collective";
    case BoundMode::kPostselection:
      return "postselection";
    case BoundMode::kDeFinetti:
      return "definetti";
  }
  return "unknown";
}

BoundMode parse_bound_mode(std::string_view text) {
  if (text == "collective") return BoundMode::kCollective;
  if (text == "postselection") return BoundMode::kPostselection;
  if (text == "definetti") return BoundMode::kDeFinetti;
  throw Error(ErrorKind::kDomain, "unknown bound '" + std::string(text) + "'");
}

LogEpsilon collective_epsilon_from_coherent(LogEpsilon eps_coh,
                                            std::uint64_t n_signals,
                                            int signal_dim) {
  if (signal_dim < 2) {
    throw Error(ErrorKind::kDomain, "signal dimension must be >= 2");
  }
  const double d2 = static_cast<double>(signal_dim) * signal_dim;
  const double exponent = d2 * d2 - 1.0;
  // log1p keeps log2(N+1) exact for small N as well as huge N.
  const double log2_np1 =
      std::log1p(static_cast<double>(n_signals)) / std::numbers::ln2;
  return LogEpsilon::from_log2_inv(eps_coh.log2_inv() + exponent * log2_np1);
}

LogEpsilon log_epsilon_sum(LogEpsilon a, LogEpsilon b) {
  // 1/(2^-a + 2^-b) = 2^lo / (1 + 2^(lo-hi)) with lo = min(a, b).
  const double lo = std::min(a.log2_inv(), b.log2_inv());
  const double hi = std::max(a.log2_inv(), b.log2_inv());
  const double value = lo - std::log1p(std::exp2(lo - hi)) / std::numbers::ln2;
  return LogEpsilon::from_log2_inv(std::max(value, 0.0));
}

ResolvedEpsilons resolve_budget(const EpsilonBudget& budget, BoundMode mode) {
  const BudgetWeights& w = budget.weights;
  const bool needs_def = mode == BoundMode::kDeFinetti;
  if (needs_def && !w.def) {
    throw Error(ErrorKind::kMissingWeight,
                "de Finetti bound requires a trace-out weight w_deF");
  }
  if (budget.n_pe < 1) {
    throw Error(ErrorKind::kDomain, "n_PE must be >= 1");
  }

  double sum = w.pa + w.bar + w.pe;
  bool positive = w.pa > 0.0 && w.bar > 0.0 && w.pe > 0.0;
  if (needs_def) {
    sum += *w.def;
    positive = positive && *w.def > 0.0;
  }
  if (!positive || !(std::abs(sum - 1.0) <= kWeightSumTolerance)) {
    throw Error(ErrorKind::kInvalidWeights,
                "weights must be positive and sum to 1 (sum = " +
                    std::to_string(sum) + ")");
  }

  ResolvedEpsilons out;
  out.total = budget.eps_col;
  out.n_pe = budget.n_pe;
  out.pa = budget.eps_col.scaled(w.pa);
  out.bar = budget.eps_col.scaled(w.bar);
  out.pe = LogEpsilon::from_log2_inv(budget.eps_col.scaled(w.pe).log2_inv() +
                                     std::log2(budget.n_pe));
  if (needs_def) out.def = budget.eps_col.scaled(*w.def);

  const LogEpsilon ec_cap = budget.eps_col.scaled(kEcSlack);
  out.ec = LogEpsilon::tighter(budget.eps_ec, ec_cap);
  out.ec_tightened = out.ec.log2_inv() > budget.eps_ec.log2_inv();
  out.achieved_total = log_epsilon_sum(out.total, out.ec);
  return out;
}

}  // namespace qkdfinite
