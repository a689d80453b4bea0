#include "qkdfinite/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qkdfinite {
namespace {

double clamp_unit(double x, const char* what) {
  if (!(x >= -kDomainSlack && x <= 1.0 + kDomainSlack)) {
    throw Error(ErrorKind::kDomain,
                std::string(what) + " outside [0,1]: " + std::to_string(x));
  }
  return std::clamp(x, 0.0, 1.0);
}

// -x log2 x with the 0 log 0 = 0 convention.
double xlog2x_neg(double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; }

}  // namespace

double binary_entropy(double x) {
  x = clamp_unit(x, "binary_entropy argument");
  if (x == 0.0 || x == 1.0) return 0.0;
  // log1p keeps the (1-x) branch accurate for small x.
  const double one_minus = 1.0 - x;
  return xlog2x_neg(x) - one_minus * std::log1p(-x) / std::numbers::ln2;
}

double pe_deviation(std::uint64_t k, LogEpsilon eps_pe) {
  if (k == 0) throw Error(ErrorKind::kDomain, "sample count must be >= 1");
  const double kd = static_cast<double>(k);
  return std::sqrt((eps_pe.ln_inv() + 2.0 * std::log1p(kd)) / (2.0 * kd));
}

double eve_information(double q, double c) {
  if (!(q >= 0.0 && q <= kEveInfoMaxQber)) {
    throw Error(ErrorKind::kDomain,
                "QBER " + std::to_string(q) +
                    " outside the validity range [0, 0.159]");
  }
  if (!(c >= -kDomainSlack && c <= 2.0 + kDomainSlack)) {
    throw Error(ErrorKind::kDomain,
                "correlation C " + std::to_string(c) + " outside [0, 2]");
  }
  c = std::clamp(c, 0.0, 2.0);

  const double half_c = 0.5 * c;
  const double s = std::sqrt(half_c);
  const double one_minus_q = 1.0 - q;

  double u = 1.0;
  double v = 0.0;
  if (s <= one_minus_q) {
    u = s / one_minus_q;
  } else {
    // s > 1 - q forces q > 0 because C <= 2.
    v = std::sqrt(std::max(half_c - one_minus_q * one_minus_q, 0.0)) / q;
    if (v > 1.0 + kDomainSlack) {
      throw Error(ErrorKind::kUnphysicalInput,
                  "(Q, C) = (" + std::to_string(q) + ", " + std::to_string(c) +
                      ") admits no state: v = " + std::to_string(v));
    }
    v = std::min(v, 1.0);
  }

  const double key_term = one_minus_q * binary_entropy(0.5 * (1.0 + u));
  const double error_term = q > 0.0 ? q * binary_entropy(0.5 * (1.0 + v)) : 0.0;
  return key_term + error_term;
}

double definetti_t(std::uint64_t n_sifted, std::uint64_t k, int signal_dim,
                   double log2_inv_eps_def) {
  if (k == 0 || k > n_sifted) {
    throw Error(ErrorKind::kDomain, "de Finetti k must satisfy 1 <= k <= N_s");
  }
  if (signal_dim < 2) {
    throw Error(ErrorKind::kDomain, "signal dimension must be >= 2");
  }
  if (!std::isfinite(log2_inv_eps_def) || log2_inv_eps_def < -1.0) {
    throw Error(ErrorKind::kDomain, "eps_deF must lie in (0, 2]");
  }
  const double d2 = static_cast<double>(signal_dim) * signal_dim;
  const double ln_two_over_eps = (1.0 + log2_inv_eps_def) * std::numbers::ln2;
  const double kd = static_cast<double>(k);
  return (static_cast<double>(n_sifted) / kd) *
         (2.0 * ln_two_over_eps + d2 * d2 * std::log(kd));
}

double definetti_pe_deviation(std::uint64_t m, double t, int signal_dim,
                              LogEpsilon eps_pe) {
  if (m == 0) throw Error(ErrorKind::kDomain, "sample count must be >= 1");
  if (signal_dim < 2) {
    throw Error(ErrorKind::kDomain, "signal dimension must be >= 2");
  }
  const double md = static_cast<double>(m);
  const double ratio = t / md;
  if (!(t >= 0.0) || ratio > 1.0 + kDomainSlack) {
    throw Error(ErrorKind::kDomain,
                "de Finetti requires 0 <= t/m <= 1 (t/m = " +
                    std::to_string(ratio) + ")");
  }
  const double d = signal_dim;
  const double radicand =
      (1.0 + std::numbers::ln2) * binary_entropy(std::min(ratio, 1.0)) +
      (eps_pe.ln_inv() + d * std::log1p(0.5 * md)) / md;
  return std::sqrt(radicand) / (d - 1.0);
}

}  // namespace qkdfinite
