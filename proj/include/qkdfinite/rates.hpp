#pragma once

#include <cstdint>
#include <optional>

#include "qkdfinite/epsilon_budget.hpp"
#include "qkdfinite/protocols.hpp"

namespace qkdfinite {

// A key rate in bits per received signal with every subtracted term kept
// separately:
//
//   r_raw = (n/N) (entropy_gap - ec - pa - smoothing - trace_out)
//           - postselection
//
// Terms that do not apply to a bound are zero.
struct RateBreakdown {
  double r_raw = 0.0;
  double r = 0.0;  // max(r_raw, 0)
  double sifting_factor = 0.0;
  double entropy_gap = 0.0;  // min H(A|E) - H(A|B)
  double ec_term = 0.0;
  double pa_term = 0.0;
  double smoothing_term = 0.0;
  double trace_out_term = 0.0;
  double postselection_term = 0.0;
  double definetti_t = 0.0;
  LogEpsilon eps_col;  // the total that was split between phases
  LogEpsilon achieved_epsilon_total;
  ProtocolEvaluation evaluation;

  double accounted_rate() const {
    return sifting_factor * (entropy_gap - ec_term - pa_term - smoothing_term -
                             trace_out_term) -
           postselection_term;
  }
};

// Collective-attack fraction
//   (n/N) [minH - H(A|B) - (1/n) log2(2/eps_EC) - (2/n) log2(1/eps_PA)
//          - (2d+3) sqrt(log2(2/eps_bar) / n)].
RateBreakdown collective_rate(const ProtocolEvaluation& eval,
                              std::uint64_t n_signals,
                              const ResolvedEpsilons& comps);

// Components for the post-selection bound: budget.eps_col is replaced by
// eps_coh (N+1)^-(d^4-1) before splitting.
ResolvedEpsilons postselection_components(LogEpsilon eps_coh,
                                          const EpsilonBudget& budget,
                                          std::uint64_t n_signals,
                                          int signal_dim);

// 2 (d^4 - 1) log2(N + 1) / N.
double postselection_correction(std::uint64_t n_signals, int signal_dim);

// Coherent-attack fraction via post-selection. `eval` must have been built
// with the eps_PE of postselection_components(...).
RateBreakdown postselection_rate(const ProtocolEvaluation& eval,
                                 std::uint64_t n_signals, LogEpsilon eps_coh,
                                 const EpsilonBudget& budget, int signal_dim);

struct DeFinettiSplit {
  std::uint64_t m = 1;  // parameter-estimation samples
  std::uint64_t k = 1;  // traced-out systems
};

// Observation as the de Finetti bound consumes it; the worst-case shifts are
// applied internally because they depend on (m, t).
struct ProtocolInput {
  Protocol protocol = Protocol::kBb84;
  double qber = 0.0;
  Correlators correlators;  // RFI only
};

// de Finetti fraction with t = definetti_t(N_s, k, d, eps_deF). Throws
// kInfeasibleTraceOut when n = N_s - m - k <= 0, t > m/2 or t/n > 1.
RateBreakdown definetti_rate(const ProtocolInput& input,
                             const SiftingPlan& plan,
                             const ResolvedEpsilons& comps,
                             DeFinettiSplit split, int signal_dim);

// Same formula with the overhead t supplied directly.
RateBreakdown definetti_rate_with_overhead(const ProtocolInput& input,
                                           std::uint64_t n_signals,
                                           std::uint64_t n_sifted,
                                           const ResolvedEpsilons& comps,
                                           DeFinettiSplit split, double t,
                                           int signal_dim);

// 1 - I_E(Q, C) - h(Q).
double asymptotic_rate_rfi(double qber, double c);

// Free parameters of a single rate evaluation.
struct PointParams {
  double p_z = 0.5;
  BudgetWeights weights;
  std::optional<DeFinettiSplit> split;  // de Finetti only
};

struct BoundInputs {
  BoundMode bound = BoundMode::kCollective;
  ProtocolInput input;
  // eps_col for the collective bound, eps_coh for the coherent ones.
  LogEpsilon eps_security;
  LogEpsilon eps_ec;
  int signal_dim = 2;
};

// Full pipeline for one point: resolve the budget at the right level, build
// the worst-case protocol evaluation with the resulting eps_PE, apply the
// bound's rate formula.
RateBreakdown evaluate_bound(const BoundInputs& inputs, std::uint64_t n_signals,
                             const PointParams& params);

int parameter_count(Protocol protocol);

}  // namespace qkdfinite
