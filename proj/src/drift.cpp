#include "qkdfinite/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "qkdfinite/errors.hpp"
#include "qkdfinite/random.hpp"

namespace qkdfinite {
namespace {

constexpr double kSeriesThreshold = 1e-4;

void check_theta(double theta_step) {
  if (!std::isfinite(theta_step) ||
      !(std::abs(theta_step) < std::numbers::pi)) {
    throw Error(ErrorKind::kDomain,
                "theta_step must be finite with |theta| < pi");
  }
}

// (cos theta)^p for real p >= 0, keeping the sign of cos for integer p.
double cos_power(double theta, double p, bool odd) {
  const double c = std::cos(theta);
  if (c > 0.0 || std::abs(theta) < kSeriesThreshold) {
    return std::exp(p * log_cos(theta));
  }
  const double magnitude = std::exp(p * std::log(std::abs(c)));
  return (c < 0.0 && odd) ? -magnitude : magnitude;
}

// Neumaier summation.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

std::string_view to_string(DriftKind kind) {
  switch (kind) {
    case DriftKind::kFixed:
      return "fixed";
    case DriftKind::kConstantVelocity:
      return "constant";
    case DriftKind::kRandomWalk:
      return "walk";
  }
  return "unknown";
}

DriftModel DriftModel::constant_velocity(double theta_step) {
  check_theta(theta_step);
  return DriftModel(DriftKind::kConstantVelocity, theta_step);
}

DriftModel DriftModel::random_walk(double theta_step) {
  check_theta(theta_step);
  return DriftModel(DriftKind::kRandomWalk, theta_step);
}

DriftModel DriftModel::parse(std::string_view kind, double theta_step) {
  if (kind == "fixed") return fixed();
  if (kind == "constant") return constant_velocity(theta_step);
  if (kind == "walk") return random_walk(theta_step);
  throw Error(ErrorKind::kDomain, "unknown drift model '" + std::string(kind) + "'");
}

double log_cos(double theta) {
  const double t2 = theta * theta;
  if (std::abs(theta) < kSeriesThreshold) {
    // -t^2/2 - t^4/12 - t^6/45 - 17 t^8/2520
    return -t2 * (0.5 + t2 * (1.0 / 12.0 + t2 * (1.0 / 45.0 + t2 * 17.0 / 2520.0)));
  }
  if (std::abs(theta) < 0.5 * std::numbers::pi) {
    // cos = 1 - 2 sin^2(theta/2); log1p keeps the relative accuracy that
    // log(cos) loses when cos is close to 1.
    const double half = std::sin(0.5 * theta);
    return std::log1p(-2.0 * half * half);
  }
  return std::log(std::cos(theta));
}

Phasor mean_phasor(const DriftModel& model, std::uint64_t n_signals) {
  if (n_signals == 0) throw Error(ErrorKind::kDomain, "N must be >= 1");
  const double theta = model.theta_step();
  if (model.kind() == DriftKind::kFixed || theta == 0.0) return {1.0, 0.0};

  const double n = static_cast<double>(n_signals);
  if (model.kind() == DriftKind::kRandomWalk) {
    return {cos_power(theta, n, n_signals % 2 == 1), 0.0};
  }
  // (1/N)(1 - e^{iN theta})/(1 - e^{i theta})
  //   = e^{i (N-1) theta/2} sin(N theta/2) / (N sin(theta/2)).
  const double kernel = std::sin(0.5 * n * theta) / (n * std::sin(0.5 * theta));
  const double phase = 0.5 * (n - 1.0) * theta;
  return {kernel * std::cos(phase), kernel * std::sin(phase)};
}

double smeared_c(double c0, const DriftModel& model, std::uint64_t n_signals) {
  if (!(c0 >= 0.0 && c0 <= 2.0)) {
    throw Error(ErrorKind::kDomain, "C0 must lie in [0, 2]");
  }
  if (n_signals == 0) throw Error(ErrorKind::kDomain, "N must be >= 1");
  const double theta = model.theta_step();
  if (model.kind() == DriftKind::kFixed || theta == 0.0) return c0;

  const double n = static_cast<double>(n_signals);
  double factor = 0.0;
  if (model.kind() == DriftKind::kRandomWalk) {
    factor = cos_power(theta, 2.0 * n, false);
  } else {
    const double kernel = std::sin(0.5 * n * theta) / (n * std::sin(0.5 * theta));
    factor = kernel * kernel;
  }
  return c0 * std::clamp(factor, 0.0, 1.0);
}

double random_walk_distribution(std::uint64_t n_steps, std::int64_t distance) {
  const std::uint64_t magnitude =
      static_cast<std::uint64_t>(distance < 0 ? -distance : distance);
  if (magnitude > n_steps || (n_steps - magnitude) % 2 != 0) return 0.0;
  const double n = static_cast<double>(n_steps);
  const double right = 0.5 * (n + static_cast<double>(distance));
  const double left = n - right;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(right + 1.0) -
                  std::lgamma(left + 1.0) - n * std::numbers::ln2);
}

Phasor direct_sum_phasor(double theta_step, std::uint64_t n_signals) {
  if (n_signals == 0) throw Error(ErrorKind::kDomain, "N must be >= 1");
  if (n_signals > kDirectSumMaxSignals) {
    throw Error(ErrorKind::kScale, "direct summation capped at 1e7 signals");
  }
  CompensatedSum c;
  CompensatedSum s;
  for (std::uint64_t k = 0; k < n_signals; ++k) {
    const double angle = static_cast<double>(k) * theta_step;
    c.add(std::cos(angle));
    s.add(std::sin(angle));
  }
  const double n = static_cast<double>(n_signals);
  return {c.value() / n, s.value() / n};
}

PhasorEstimate sample_random_walk_phasor(double theta_step,
                                         std::uint64_t n_signals,
                                         std::uint64_t trials,
                                         std::uint64_t seed, unsigned workers) {
  if (n_signals == 0) throw Error(ErrorKind::kDomain, "N must be >= 1");
  if (trials == 0) throw Error(ErrorKind::kDomain, "trials must be >= 1");

  // After k steps beta = j theta with |j| <= k, so tabulate once.
  const std::int64_t span = static_cast<std::int64_t>(n_signals);
  std::vector<double> cos_table(2 * n_signals + 1);
  std::vector<double> sin_table(2 * n_signals + 1);
  for (std::int64_t j = -span; j <= span; ++j) {
    const double angle = static_cast<double>(j) * theta_step;
    cos_table[j + span] = std::cos(angle);
    sin_table[j + span] = std::sin(angle);
  }

  std::vector<double> trial_c(trials);
  std::vector<double> trial_s(trials);
  const double n = static_cast<double>(n_signals);

  const auto run_trials = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      SplitMix64 rng(SplitMix64::derive(seed, t));
      std::uint64_t bits = 0;
      int bits_left = 0;
      std::int64_t position = span;
      double sum_c = 0.0;
      double sum_s = 0.0;
      for (std::uint64_t k = 0; k < n_signals; ++k) {
        sum_c += cos_table[position];
        sum_s += sin_table[position];
        if (bits_left == 0) {
          bits = rng();
          bits_left = 64;
        }
        position += (bits & 1U) ? 1 : -1;
        bits >>= 1;
        --bits_left;
      }
      trial_c[t] = sum_c / n;
      trial_s[t] = sum_s / n;
    }
  };

  unsigned pool = workers == 0 ? std::max(1U, std::thread::hardware_concurrency())
                               : workers;
  pool = static_cast<unsigned>(std::min<std::uint64_t>(pool, trials));
  if (pool <= 1) {
    run_trials(0, trials);
  } else {
    std::vector<std::jthread> threads;
    const std::uint64_t chunk = (trials + pool - 1) / pool;
    for (unsigned w = 0; w < pool; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(trials, begin + chunk);
      if (begin < end) threads.emplace_back(run_trials, begin, end);
    }
  }

  // Reduction in trial order so the result is independent of `pool`.
  CompensatedSum mean_c;
  CompensatedSum mean_s;
  CompensatedSum norm;
  for (std::uint64_t t = 0; t < trials; ++t) {
    mean_c.add(trial_c[t]);
    mean_s.add(trial_s[t]);
    norm.add(trial_c[t] * trial_c[t] + trial_s[t] * trial_s[t]);
  }
  const double count = static_cast<double>(trials);
  PhasorEstimate out;
  out.trials = trials;
  out.rng_algorithm = std::string(SplitMix64::kAlgorithm);
  out.mean = {mean_c.value() / count, mean_s.value() / count};
  out.mean_squared_norm = norm.value() / count;

  if (trials > 1) {
    CompensatedSum var_c;
    CompensatedSum var_s;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const double dc = trial_c[t] - out.mean.c_bar;
      const double ds = trial_s[t] - out.mean.s_bar;
      var_c.add(dc * dc);
      var_s.add(ds * ds);
    }
    out.standard_error = {std::sqrt(var_c.value() / (count - 1.0) / count),
                          std::sqrt(var_s.value() / (count - 1.0) / count)};
  } else {
    out.standard_error = {0.0, 0.0};
  }
  return out;
}

double expected_step_averaged_walk(double theta_step, std::uint64_t n_signals) {
  if (n_signals == 0) throw Error(ErrorKind::kDomain, "N must be >= 1");
  if (theta_step == 0.0) return 1.0;
  const double n = static_cast<double>(n_signals);
  // (1 - c^N) / (N (1 - c)) with 1 - c = 2 sin^2(theta/2).
  const double half_sin = std::sin(0.5 * theta_step);
  const double one_minus_c = 2.0 * half_sin * half_sin;
  double one_minus_cn;
  if (std::cos(theta_step) > 0.0) {
    one_minus_cn = -std::expm1(n * log_cos(theta_step));
  } else {
    one_minus_cn = 1.0 - cos_power(theta_step, n, n_signals % 2 == 1);
  }
  return one_minus_cn / (n * one_minus_c);
}

}  // namespace qkdfinite
