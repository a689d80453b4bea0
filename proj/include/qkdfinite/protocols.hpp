#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "qkdfinite/log_epsilon.hpp"

namespace qkdfinite {

enum class Protocol { kBb84, kRfi };

std::string_view to_string(Protocol protocol);
Protocol parse_protocol(std::string_view text);

// Cross-basis correlators <XX>, <XY>, <YX>, <YY>.
class Correlators {
 public:
  Correlators() = default;
  // Throws kDomain unless |v_j| <= 1 and sum v_j^2 <= 2 (+1e-12).
  explicit Correlators(const std::array<double, 4>& values);

  const std::array<double, 4>& values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  // C = v1^2 + v2^2 + v3^2 + v4^2.
  double c() const;

 private:
  std::array<double, 4> values_{};
};

struct RfiObservation {
  double qber = 0.0;
  Correlators correlators;
};

// Basis-choice model for N received signals. The key basis Z is picked
// with probability p_Z, the two others (X, Y for RFI) with p = (1-p_Z)/2.
class SiftingPlan {
 public:
  SiftingPlan(std::uint64_t n_signals, double p_z);

  std::uint64_t n_signals() const { return n_signals_; }
  double p_z() const { return p_z_; }
  double p_side() const { return 0.5 * (1.0 - p_z_); }

  // Raw key: Z/Z coincidences, n = round(N p_Z^2).
  std::uint64_t key_count() const;
  // Samples per RFI correlator, m = round(N p^2).
  std::uint64_t rfi_estimation_count() const;
  // BB84 X/X coincidences, m = round(N (1-p_Z)^2).
  std::uint64_t bb84_estimation_count() const;
  // Signals kept after sifting (key plus estimation coincidences), used as
  // N_s by the de Finetti bound.
  std::uint64_t sifted_count(Protocol protocol) const;

 private:
  std::uint64_t n_signals_;
  double p_z_;
};

// What the rate formulas consume from a protocol.
struct ProtocolEvaluation {
  double min_h_a_given_e = 0.0;  // worst-case H(A|E), bits
  double h_a_given_b = 0.0;      // error-correction cost h(Q_observed)
  std::uint64_t n = 0;           // raw key length
  int n_pe = 1;
  int d_alphabet = 2;
  double q_prime = 0.0;
  std::optional<double> c_prime;
};

// Correlators of the ideal-state family smeared by a mean phasor
// (c_bar, s_bar): a = sqrt(C0/2) and (a c, -a s, -a s, -a c).
Correlators canonical_correlators(double c0, double c_bar, double s_bar);

// Moves each correlator toward zero by delta, flooring magnitudes at 0.
Correlators shrink_correlators(const Correlators& v, double delta);

// RFI evaluation with explicit worst-case shifts on Q and on each v_j.
ProtocolEvaluation rfi_evaluate(const RfiObservation& obs, std::uint64_t n_key,
                                double q_shift, double v_shift);

// Q' = Q + delta(n), v_j' = v_j shrunk by delta(m), min H = 1 - I_E(Q', C').
ProtocolEvaluation rfi_worst_case(const RfiObservation& obs,
                                  const SiftingPlan& plan, LogEpsilon eps_pe);

// BB84 evaluation with an explicit shift on Q; min H = 1 - h(Q').
ProtocolEvaluation bb84_evaluate(double qber, std::uint64_t n_key,
                                 double q_shift);

// Q' = Q + delta(m) with m the X-basis coincidence count.
ProtocolEvaluation bb84_worst_case(double qber, const SiftingPlan& plan,
                                   LogEpsilon eps_pe);

}  // namespace qkdfinite
