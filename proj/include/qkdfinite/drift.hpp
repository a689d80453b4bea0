#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace qkdfinite {

enum class DriftKind { kFixed, kConstantVelocity, kRandomWalk };

std::string_view to_string(DriftKind kind);

// Misalignment dynamics of the X/Y frames. theta_step is the angle change
// per received signal (angular velocity times the signal spacing).
class DriftModel {
 public:
  static DriftModel fixed() { return DriftModel(DriftKind::kFixed, 0.0); }
  static DriftModel constant_velocity(double theta_step);
  static DriftModel random_walk(double theta_step);
  // kind from "fixed" | "constant" | "walk".
  static DriftModel parse(std::string_view kind, double theta_step);

  DriftKind kind() const { return kind_; }
  double theta_step() const { return theta_step_; }

 private:
  DriftModel(DriftKind kind, double theta_step)
      : kind_(kind), theta_step_(theta_step) {}

  DriftKind kind_;
  double theta_step_;
};

// Time average (1/N) sum_k e^{i beta_k} = c_bar + i s_bar.
struct Phasor {
  double c_bar = 1.0;
  double s_bar = 0.0;

  double squared_norm() const { return c_bar * c_bar + s_bar * s_bar; }
};

// ln(cos theta), by series below |theta| = 1e-4 where cos rounds to 1.
double log_cos(double theta);

// Fixed: (1, 0). Constant velocity: the geometric sum in Dirichlet-kernel
// form. Random walk: the expected phasor ((cos theta)^N, 0).
Phasor mean_phasor(const DriftModel& model, std::uint64_t n_signals);

// C0 (c_bar^2 + s_bar^2) in closed form, within [0, C0].
double smeared_c(double c0, const DriftModel& model, std::uint64_t n_signals);

// Probability that an N-step +-1 walk ends at `distance`:
// 2^-N binom(N, (N+d)/2), zero on a parity mismatch or |d| > N.
double random_walk_distribution(std::uint64_t n_steps, std::int64_t distance);

// Brute-force (1/N) sum_{k<N} e^{ik theta} with compensated summation.
// Throws kScale for N above kDirectSumMaxSignals.
inline constexpr std::uint64_t kDirectSumMaxSignals = 10'000'000;
Phasor direct_sum_phasor(double theta_step, std::uint64_t n_signals);

struct PhasorEstimate {
  Phasor mean;
  Phasor standard_error;
  // E[c_bar^2 + s_bar^2] over walks, which differs from |E[phasor]|^2 at
  // second order.
  double mean_squared_norm = 1.0;
  std::uint64_t trials = 0;
  std::string rng_algorithm;
};

// Monte Carlo over `trials` independent +-theta walks of N signals
// (beta_0 = 0), each averaged over its N samples. Trial i draws from
// SplitMix64::derive(seed, i), so the result does not depend on `workers`
// (0 = hardware concurrency).
PhasorEstimate sample_random_walk_phasor(double theta_step,
                                         std::uint64_t n_signals,
                                         std::uint64_t trials,
                                         std::uint64_t seed,
                                         unsigned workers = 0);

// (1/N) sum_{k<N} (cos theta)^k, the expected step-averaged c_bar of a walk.
double expected_step_averaged_walk(double theta_step, std::uint64_t n_signals);

}  // namespace qkdfinite
