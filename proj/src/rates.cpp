#include "qkdfinite/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qkdfinite/entropy.hpp"

namespace qkdfinite {
namespace {

void finalize(RateBreakdown& b) {
  b.r_raw = b.accounted_rate();
  b.r = std::max(b.r_raw, 0.0);
}

void check_counts(const ProtocolEvaluation& eval, std::uint64_t n_signals,
                  const ResolvedEpsilons& comps) {
  if (n_signals == 0) throw Error(ErrorKind::kDomain, "N must be >= 1");
  if (eval.n == 0 || eval.n > n_signals) {
    throw Error(ErrorKind::kDomain, "raw key length must lie in [1, N]");
  }
  if (eval.n_pe != comps.n_pe) {
    throw Error(ErrorKind::kDomain,
                "budget n_PE does not match the protocol's parameter count");
  }
}

double log2_of_np1(std::uint64_t n_signals) {
  return std::log1p(static_cast<double>(n_signals)) / std::numbers::ln2;
}

}  // namespace

int parameter_count(Protocol protocol) {
  return protocol == Protocol::kRfi ? 5 : 1;
}

RateBreakdown collective_rate(const ProtocolEvaluation& eval,
                              std::uint64_t n_signals,
                              const ResolvedEpsilons& comps) {
  check_counts(eval, n_signals, comps);
  const double n = static_cast<double>(eval.n);
  const double d = eval.d_alphabet;

  RateBreakdown b;
  b.evaluation = eval;
  b.eps_col = comps.total;
  b.achieved_epsilon_total = comps.achieved_total;
  b.sifting_factor = n / static_cast<double>(n_signals);
  b.entropy_gap = eval.min_h_a_given_e - eval.h_a_given_b;
  b.ec_term = comps.ec.log2_two_over() / n;
  b.pa_term = 2.0 * comps.pa.log2_inv() / n;
  b.smoothing_term = (2.0 * d + 3.0) * std::sqrt(comps.bar.log2_two_over() / n);
  finalize(b);
  return b;
}

ResolvedEpsilons postselection_components(LogEpsilon eps_coh,
                                          const EpsilonBudget& budget,
                                          std::uint64_t n_signals,
                                          int signal_dim) {
  EpsilonBudget rescaled = budget;
  rescaled.eps_col =
      collective_epsilon_from_coherent(eps_coh, n_signals, signal_dim);
  return resolve_budget(rescaled, BoundMode::kPostselection);
}

double postselection_correction(std::uint64_t n_signals, int signal_dim) {
  const double d2 = static_cast<double>(signal_dim) * signal_dim;
  return 2.0 * (d2 * d2 - 1.0) * log2_of_np1(n_signals) /
         static_cast<double>(n_signals);
}

RateBreakdown postselection_rate(const ProtocolEvaluation& eval,
                                 std::uint64_t n_signals, LogEpsilon eps_coh,
                                 const EpsilonBudget& budget, int signal_dim) {
  const ResolvedEpsilons comps =
      postselection_components(eps_coh, budget, n_signals, signal_dim);
  RateBreakdown b = collective_rate(eval, n_signals, comps);
  b.postselection_term = postselection_correction(n_signals, signal_dim);

  // Coherent-level total: eps_coh + (N+1)^(d^4-1) eps_EC.
  const double inflation = comps.total.log2_inv() - eps_coh.log2_inv();
  b.achieved_epsilon_total = log_epsilon_sum(
      eps_coh, LogEpsilon::from_log2_inv(comps.ec.log2_inv() - inflation));
  finalize(b);
  return b;
}

RateBreakdown definetti_rate_with_overhead(const ProtocolInput& input,
                                           std::uint64_t n_signals,
                                           std::uint64_t n_sifted,
                                           const ResolvedEpsilons& comps,
                                           DeFinettiSplit split, double t,
                                           int signal_dim) {
  if (split.m == 0 || split.k == 0) {
    throw Error(ErrorKind::kDomain, "de Finetti m and k must be >= 1");
  }
  if (n_sifted > n_signals) {
    throw Error(ErrorKind::kDomain, "N_s cannot exceed N");
  }
  if (split.m + split.k >= n_sifted) {
    throw Error(ErrorKind::kInfeasibleTraceOut,
                "no raw key left: m + k >= N_s");
  }
  const std::uint64_t n_key = n_sifted - split.m - split.k;
  const double n = static_cast<double>(n_key);
  const double m = static_cast<double>(split.m);
  if (t > 0.5 * m || t / n > 1.0) {
    throw Error(ErrorKind::kInfeasibleTraceOut,
                "overhead t = " + std::to_string(t) +
                    " violates t <= m/2 or t <= n");
  }
  if (!comps.def) {
    throw Error(ErrorKind::kMissingWeight, "de Finetti needs eps_deF");
  }

  const double delta = definetti_pe_deviation(split.m, t, signal_dim, comps.pe);
  ProtocolEvaluation eval =
      input.protocol == Protocol::kRfi
          ? rfi_evaluate({input.qber, input.correlators}, n_key, delta, delta)
          : bb84_evaluate(input.qber, n_key, delta);
  check_counts(eval, n_signals, comps);

  const double d = eval.d_alphabet;
  const double dim = signal_dim;
  RateBreakdown b;
  b.evaluation = eval;
  b.eps_col = comps.total;
  b.achieved_epsilon_total = comps.achieved_total;
  b.definetti_t = t;
  b.sifting_factor = n / static_cast<double>(n_signals);
  b.entropy_gap = eval.min_h_a_given_e - eval.h_a_given_b;
  b.ec_term = comps.ec.log2_two_over() / n;
  b.pa_term = 2.0 * comps.pa.log2_inv() / n;
  b.trace_out_term = 2.0 * (m + static_cast<double>(split.k)) *
                     std::log2(dim * dim) / n;
  b.smoothing_term =
      (2.5 * d + 4.0) *
      std::sqrt(comps.bar.log2_two_over() / n + binary_entropy(t / n));
  finalize(b);
  return b;
}

RateBreakdown definetti_rate(const ProtocolInput& input,
                             const SiftingPlan& plan,
                             const ResolvedEpsilons& comps,
                             DeFinettiSplit split, int signal_dim) {
  if (!comps.def) {
    throw Error(ErrorKind::kMissingWeight, "de Finetti needs eps_deF");
  }
  const std::uint64_t n_sifted = plan.sifted_count(input.protocol);
  if (split.k == 0 || split.m == 0) {
    throw Error(ErrorKind::kDomain, "de Finetti m and k must be >= 1");
  }
  if (split.m + split.k >= n_sifted) {
    throw Error(ErrorKind::kInfeasibleTraceOut,
                "no raw key left: m + k >= N_s");
  }
  const double t =
      definetti_t(n_sifted, split.k, signal_dim, comps.def->log2_inv());
  return definetti_rate_with_overhead(input, plan.n_signals(), n_sifted, comps,
                                      split, t, signal_dim);
}

double asymptotic_rate_rfi(double qber, double c) {
  return 1.0 - eve_information(qber, c) - binary_entropy(qber);
}

RateBreakdown evaluate_bound(const BoundInputs& inputs, std::uint64_t n_signals,
                             const PointParams& params) {
  const SiftingPlan plan(n_signals, params.p_z);
  EpsilonBudget budget{inputs.eps_security, inputs.eps_ec, params.weights,
                       parameter_count(inputs.input.protocol)};

  const auto worst_case = [&](LogEpsilon eps_pe) {
    if (inputs.input.protocol == Protocol::kRfi) {
      return rfi_worst_case({inputs.input.qber, inputs.input.correlators}, plan,
                            eps_pe);
    }
    return bb84_worst_case(inputs.input.qber, plan, eps_pe);
  };

  switch (inputs.bound) {
    case BoundMode::kCollective: {
      const ResolvedEpsilons comps =
          resolve_budget(budget, BoundMode::kCollective);
      return collective_rate(worst_case(comps.pe), n_signals, comps);
    }
    case BoundMode::kPostselection: {
      const ResolvedEpsilons comps = postselection_components(
          inputs.eps_security, budget, n_signals, inputs.signal_dim);
      return postselection_rate(worst_case(comps.pe), n_signals,
                                inputs.eps_security, budget,
                                inputs.signal_dim);
    }
    case BoundMode::kDeFinetti: {
      if (!params.split) {
        throw Error(ErrorKind::kDomain, "de Finetti needs an (m, k) split");
      }
      const ResolvedEpsilons comps =
          resolve_budget(budget, BoundMode::kDeFinetti);
      return definetti_rate(inputs.input, plan, comps, *params.split,
                            inputs.signal_dim);
    }
  }
  throw Error(ErrorKind::kDomain, "unknown bound");
}

}  // namespace qkdfinite
