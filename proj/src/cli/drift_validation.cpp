#include "qkdfinite/cli/drift_validation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "qkdfinite/drift.hpp"
#include "qkdfinite/random.hpp"

namespace qkdfinite::cli {
namespace {

constexpr double kPhasorTolerance = 1e-10;
constexpr double kFactorizationTolerance = 1e-12;
constexpr double kMonteCarloSigmas = 5.0;

double log_uniform(SplitMix64& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
}

std::uint64_t log_uniform_count(SplitMix64& rng, double hi) {
  return static_cast<std::uint64_t>(std::llround(log_uniform(rng, 1.0, hi)));
}

DriftCheck check(std::string name, double worst, double tolerance) {
  return {std::move(name), worst, tolerance, worst <= tolerance};
}

}  // namespace

std::vector<DriftCheck> run_drift_validation(std::uint64_t trials,
                                             std::uint64_t seed,
                                             unsigned workers) {
  std::vector<DriftCheck> checks;

  double worst = 0.0;
  for (double theta : {0.1, 0.5, 1.0, 2.0}) {
    for (std::uint64_t n = 1; n <= 60; ++n) {
      std::complex<double> sum = 0.0;
      const auto span = static_cast<std::int64_t>(n);
      for (std::int64_t d = -span; d <= span; ++d) {
        sum += std::polar(random_walk_distribution(n, d), theta * d);
      }
      worst = std::max(worst, std::abs(sum - std::pow(std::cos(theta), n)));
    }
  }
  checks.push_back(check("walk_identity", worst, kPhasorTolerance));

  SplitMix64 rng(SplitMix64::derive(seed, 1));
  worst = 0.0;
  double worst_factor = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double theta = log_uniform(rng, 1e-9, 1.0);
    const std::uint64_t n = log_uniform_count(rng, 1e5);
    const DriftModel model = DriftModel::constant_velocity(theta);
    const Phasor closed = mean_phasor(model, n);
    const Phasor direct = direct_sum_phasor(theta, n);
    worst = std::max({worst, std::abs(closed.c_bar - direct.c_bar),
                      std::abs(closed.s_bar - direct.s_bar)});
    const double c0 = 2.0 * rng.uniform();
    worst_factor = std::max(
        worst_factor, std::abs(smeared_c(c0, model, n) - c0 * closed.squared_norm()));
  }
  checks.push_back(check("constant_closed_form", worst, kPhasorTolerance));
  checks.push_back(
      check("smeared_c_factorization", worst_factor, kFactorizationTolerance));

  SplitMix64 mc_rng(SplitMix64::derive(seed, 2));
  worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double theta = 0.01 + mc_rng.uniform();
    const std::uint64_t n = 1 + static_cast<std::uint64_t>(mc_rng.uniform() * 500);
    const PhasorEstimate est = sample_random_walk_phasor(
        theta, n, trials, SplitMix64::derive(seed, 100 + i), workers);
    const double expected = expected_step_averaged_walk(theta, n);
    const auto sigmas = [](double diff, double se) {
      if (se > 0.0) return std::abs(diff) / se;
      // Degenerate walks (N = 1) have no spread; only rounding may differ.
      return std::abs(diff) <= 1e-12 ? 0.0
                                     : std::numeric_limits<double>::infinity();
    };
    worst = std::max({worst, sigmas(est.mean.c_bar - expected, est.standard_error.c_bar),
                      sigmas(est.mean.s_bar, est.standard_error.s_bar)});
  }
  checks.push_back(check("walk_monte_carlo", worst, kMonteCarloSigmas));
  return checks;
}

}  // namespace qkdfinite::cli
