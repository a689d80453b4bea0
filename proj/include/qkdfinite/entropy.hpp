#pragma once

#include <cstdint>

#include "qkdfinite/log_epsilon.hpp"

namespace qkdfinite {

// Arguments this close to the edge of [0, 1] are treated as rounding noise
// and clamped rather than rejected.
inline constexpr double kDomainSlack = 1e-12;

// Upper end of the QBER range over which eve_information is a valid bound.
inline constexpr double kEveInfoMaxQber = 0.159;

// h(x) = -x log2 x - (1-x) log2(1-x), in bits; h(0) = h(1) = 0.
double binary_entropy(double x);

// Worst-case statistical deviation of an estimate drawn from k samples:
// sqrt((ln(1/eps_PE) + 2 ln(k+1)) / (2k)).
double pe_deviation(std::uint64_t k, LogEpsilon eps_pe);

// Upper bound on Eve's information (bits per raw-key bit) for the
// reference-frame-independent protocol, given the QBER q and the
// rotation-invariant correlation C in [0, 2].
//
//   u = min(sqrt(C/2) / (1-q), 1)
//   v = sqrt(C/2 - (1-q)^2 u^2) / q
//   I_E = (1-q) h((1+u)/2) + q h((1+v)/2)
//
// The q-weighted term is taken to be 0 at q = 0. Throws kDomain when q lies
// outside [0, 0.159] and kUnphysicalInput when v > 1.
double eve_information(double q, double c);

// de Finetti distance parameter
//   t = (N_s / k) (2 ln(2/eps_deF) + d^4 ln k).
// eps_deF is passed as log2(1/eps_deF) and may be as low as -1 (eps_deF = 2,
// where the logarithmic term vanishes).
double definetti_t(std::uint64_t n_sifted, std::uint64_t k, int signal_dim,
                   double log2_inv_eps_def);

// Parameter-estimation deviation under the de Finetti reduction:
//   (1/(d-1)) sqrt((1 + ln 2) h(t/m) + (ln(1/eps_PE) + d ln(m/2 + 1)) / m)
// with h in bits.
double definetti_pe_deviation(std::uint64_t m, double t, int signal_dim,
                              LogEpsilon eps_pe);

}  // namespace qkdfinite
