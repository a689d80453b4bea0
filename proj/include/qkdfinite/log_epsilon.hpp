#pragma once

#include <cmath>
#include <compare>
#include <numbers>

#include "qkdfinite/errors.hpp"

namespace qkdfinite {

// A failure probability eps in (0, 1], held as log2(1/eps).
//
// Security parameters after the post-selection rescaling are of order
// (N+1)^-15 and underflow binary64 long before N gets interesting, so nothing
// in the library ever holds eps on a linear scale.
class LogEpsilon {
 public:
  constexpr LogEpsilon() = default;

  static LogEpsilon from_log2_inv(double log2_inv) {
    if (!std::isfinite(log2_inv) || log2_inv < 0.0) {
      throw Error(ErrorKind::kDomain,
                  "log2(1/eps) must be finite and >= 0 (eps in (0,1])");
    }
    return LogEpsilon(log2_inv);
  }

  // Convenience for user input such as 1e-5. Only valid while eps is
  // representable, which is always true for values typed by a person.
  static LogEpsilon from_epsilon(double eps) {
    if (!(eps > 0.0) || eps > 1.0) {
      throw Error(ErrorKind::kDomain, "epsilon must lie in (0, 1]");
    }
    return LogEpsilon(-std::log2(eps));
  }

  constexpr double log2_inv() const { return log2_inv_; }
  double ln_inv() const { return log2_inv_ * std::numbers::ln2; }
  // log2(2/eps), the form that appears in the error-correction and
  // smoothing terms.
  constexpr double log2_two_over() const { return 1.0 + log2_inv_; }

  // eps * weight for weight in (0, 1].
  LogEpsilon scaled(double weight) const {
    if (!(weight > 0.0) || weight > 1.0) {
      throw Error(ErrorKind::kDomain, "epsilon weight must lie in (0, 1]");
    }
    return LogEpsilon(log2_inv_ - std::log2(weight));
  }

  // The smaller (tighter) of two failure probabilities.
  static LogEpsilon tighter(LogEpsilon a, LogEpsilon b) {
    return a.log2_inv_ >= b.log2_inv_ ? a : b;
  }

  friend constexpr auto operator<=>(const LogEpsilon&,
                                    const LogEpsilon&) = default;

 private:
  constexpr explicit LogEpsilon(double log2_inv) : log2_inv_(log2_inv) {}

  double log2_inv_ = 0.0;
};

}  // namespace qkdfinite
