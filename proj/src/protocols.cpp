#include "qkdfinite/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qkdfinite/entropy.hpp"

namespace qkdfinite {
namespace {

constexpr int kRfiParameterCount = 5;  // Q and v1..v4
constexpr int kBb84ParameterCount = 1;

std::uint64_t rounded_count(double n_signals, double fraction) {
  const double value = std::round(n_signals * fraction);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(value));
}

}  // namespace

std::string_view to_string(Protocol protocol) {
  return protocol == Protocol::kBb84 ? "bb84" : "rfi";
}

Protocol parse_protocol(std::string_view text) {
  if (text == "bb84") return Protocol::kBb84;
  if (text == "rfi") return Protocol::kRfi;
  throw Error(ErrorKind::kDomain,
              "unknown protocol '" + std::string(text) + "'");
}

Correlators::Correlators(const std::array<double, 4>& values)
    : values_(values) {
  for (double v : values_) {
    if (!(std::abs(v) <= 1.0)) {
      throw Error(ErrorKind::kDomain, "correlator magnitude exceeds 1");
    }
  }
  if (c() > 2.0 + kDomainSlack) {
    throw Error(ErrorKind::kDomain, "correlation C exceeds 2");
  }
}

double Correlators::c() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return sum;
}

SiftingPlan::SiftingPlan(std::uint64_t n_signals, double p_z)
    : n_signals_(n_signals), p_z_(p_z) {
  if (n_signals == 0) throw Error(ErrorKind::kDomain, "N must be >= 1");
  if (!(p_z > 0.0 && p_z < 1.0)) {
    throw Error(ErrorKind::kDomain, "p_Z must lie in (0, 1)");
  }
}

std::uint64_t SiftingPlan::key_count() const {
  return rounded_count(static_cast<double>(n_signals_), p_z_ * p_z_);
}

std::uint64_t SiftingPlan::rfi_estimation_count() const {
  const double p = p_side();
  return rounded_count(static_cast<double>(n_signals_), p * p);
}

std::uint64_t SiftingPlan::bb84_estimation_count() const {
  const double px = 1.0 - p_z_;
  return rounded_count(static_cast<double>(n_signals_), px * px);
}

std::uint64_t SiftingPlan::sifted_count(Protocol protocol) const {
  const double px = 1.0 - p_z_;
  const double p = p_side();
  const double fraction = protocol == Protocol::kBb84
                              ? p_z_ * p_z_ + px * px
                              : p_z_ * p_z_ + 4.0 * p * p;
  return rounded_count(static_cast<double>(n_signals_), fraction);
}

Correlators canonical_correlators(double c0, double c_bar, double s_bar) {
  if (!(c0 >= 0.0 && c0 <= 2.0)) {
    throw Error(ErrorKind::kDomain, "C0 must lie in [0, 2]");
  }
  if (c_bar * c_bar + s_bar * s_bar > 1.0 + kDomainSlack) {
    throw Error(ErrorKind::kDomain, "phasor magnitude exceeds 1");
  }
  const double a = std::sqrt(0.5 * c0);
  return Correlators({a * c_bar, -a * s_bar, -a * s_bar, -a * c_bar});
}

Correlators shrink_correlators(const Correlators& v, double delta) {
  std::array<double, 4> out{};
  for (std::size_t j = 0; j < 4; ++j) {
    const double magnitude = std::max(std::abs(v[j]) - delta, 0.0);
    out[j] = std::copysign(magnitude, v[j]);
  }
  return Correlators(out);
}

ProtocolEvaluation rfi_evaluate(const RfiObservation& obs, std::uint64_t n_key,
                                double q_shift, double v_shift) {
  const double q_prime = obs.qber + q_shift;
  const double c_prime = shrink_correlators(obs.correlators, v_shift).c();

  ProtocolEvaluation eval;
  eval.q_prime = q_prime;
  eval.c_prime = c_prime;
  eval.min_h_a_given_e =
      std::clamp(1.0 - eve_information(q_prime, c_prime), 0.0, 1.0);
  eval.h_a_given_b = binary_entropy(obs.qber);
  eval.n = n_key;
  eval.n_pe = kRfiParameterCount;
  eval.d_alphabet = 2;
  return eval;
}

ProtocolEvaluation rfi_worst_case(const RfiObservation& obs,
                                  const SiftingPlan& plan, LogEpsilon eps_pe) {
  const std::uint64_t n = plan.key_count();
  const std::uint64_t m = plan.rfi_estimation_count();
  return rfi_evaluate(obs, n, pe_deviation(n, eps_pe), pe_deviation(m, eps_pe));
}

ProtocolEvaluation bb84_evaluate(double qber, std::uint64_t n_key,
                                 double q_shift) {
  if (!(qber >= 0.0 && qber < 0.5)) {
    throw Error(ErrorKind::kDomain, "BB84 QBER must lie in [0, 0.5)");
  }
  const double q_prime = qber + q_shift;
  if (q_prime >= 0.5) {
    throw Error(ErrorKind::kDomain,
                "worst-case QBER " + std::to_string(q_prime) + " reaches 1/2");
  }
  ProtocolEvaluation eval;
  eval.q_prime = q_prime;
  eval.min_h_a_given_e = std::clamp(1.0 - binary_entropy(q_prime), 0.0, 1.0);
  eval.h_a_given_b = binary_entropy(qber);
  eval.n = n_key;
  eval.n_pe = kBb84ParameterCount;
  eval.d_alphabet = 2;
  return eval;
}

ProtocolEvaluation bb84_worst_case(double qber, const SiftingPlan& plan,
                                   LogEpsilon eps_pe) {
  return bb84_evaluate(qber, plan.key_count(),
                       pe_deviation(plan.bb84_estimation_count(), eps_pe));
}

}  // namespace qkdfinite
