#include "gbc/math_util.hpp"

#include <cmath>
#include <limits>

namespace gbc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // log(2*pi)/2

// Tail series factor of the asymptotic expansion
//   Q(x) ~ phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8),
// accurate to better than 1e-12 relative for x >= 37.
double tail_series(double x) {
    const double ix2 = 1.0 / (x * x);
    return 1.0 + ix2 * (-1.0 + ix2 * (3.0 + ix2 * (-15.0 + ix2 * 105.0)));
}

}  // namespace

double q_function(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) return 1.0 - q_function(-x);
    if (x <= 37.0) return 0.5 * std::erfc(x * kInvSqrt2);
    return std::exp(log_q_function(x));
}

double log_q_function(double x) {
    if (std::isnan(x)) return x;
    if (x > 37.0) {
        // erfc leaves the normal range around here; switch to the expansion.
        return -0.5 * x * x - std::log(x) - kHalfLogTwoPi + std::log(tail_series(x));
    }
    if (x >= 0.0) return std::log(0.5 * std::erfc(x * kInvSqrt2));
    // Q(x) = 1 - Q(-x), and Q(-x) <= 0.5 here, so log1p is safe.
    return std::log1p(-q_function(-x));
}

double log_sum_exp(double a, double b) {
    const double inf = std::numeric_limits<double>::infinity();
    if (a == -inf) return b;
    if (b == -inf) return a;
    const double m = a > b ? a : b;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace gbc
