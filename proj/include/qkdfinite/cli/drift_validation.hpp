#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qkdfinite::cli {

struct DriftCheck {
  std::string name;
  double worst = 0.0;  // largest observed discrepancy (sigmas for Monte Carlo)
  double tolerance = 0.0;
  bool passed = false;
};

// Closed forms against brute-force sums and Monte Carlo:
//   walk_identity           sum_d e^{i theta d} P_N(d) vs (cos theta)^N
//   constant_closed_form    mean_phasor vs direct_sum_phasor
//   smeared_c_factorization smeared_c vs C0 |mean_phasor|^2
//   walk_monte_carlo        sampled step-averaged phasor vs its expectation
std::vector<DriftCheck> run_drift_validation(std::uint64_t trials,
                                             std::uint64_t seed,
                                             unsigned workers);

}  // namespace qkdfinite::cli
