// Log-domain accumulation helpers shared by the trellis recursions.
#pragma once

#include <cmath>
#include <limits>

namespace eqsim::detail {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow; tolerates -inf operands.
inline double log_add(double a, double b) {
    if (a == kLogZero) return b;
    if (b == kLogZero) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace eqsim::detail
