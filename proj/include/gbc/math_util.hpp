#pragma once

namespace gbc {

/// Gaussian tail probability Q(x) = P[N(0,1) > x].
/// Relative error below 1e-12 for x in [0, 37] (complementary error
/// function route); the standard asymptotic expansion beyond, which
/// underflows to 0 near x = 38.6.
double q_function(double x);

/// log Q(x), finite far past the point where Q itself underflows a
/// double (usable until x^2/2 overflows, i.e. x around 1e154).
double log_q_function(double x);

/// log(e^a + e^b) without overflow; tolerates -infinity on either side.
double log_sum_exp(double a, double b);

}  // namespace gbc
