#pragma once

#include <vector>

#include "gbc/channel.hpp"

namespace gbc {

/// Capacity of the broadcast channel with a common message, in nats per
/// symbol: (1/2) log(1 + P / sigma_1^2). Feedback does not change it.
double capacity(const ChannelModel& ch);

/// Effective noise seen by receiver k once the channel has been degraded
/// receiver by receiver: N_k = (sum_{k' <= k} 1/sigma_{k'}^2)^-1.
/// Strictly decreasing in k, with N_1 = sigma_1^2.
struct EffectiveNoises {
    std::vector<double> values;
};

EffectiveNoises effective_noises(const ChannelModel& ch);

/// Solution of the rate-equalizing system: alphas sum to one, every rate
///   R_k = (1/2) log(1 + alpha_k P / ((1 - alpha_1 - ... - alpha_k) P + N_k))
/// equals the common value (with N_1 = sigma_1^2). residuals[0] is
/// |sum alpha - 1|; residuals[k-1] for k >= 2 is |R_k - R_1| evaluated on
/// the raw equations, independent of the solver's internal reduction.
struct AlphaStar {
    std::vector<double> alphas;
    double common_rate = 0.0;       // nats/symbol
    std::vector<double> residuals;
    bool degenerate = false;        // true only for K = 1 (alpha_1 = 1 boundary)
};

/// Solves the system above by a sign-change scan (1000 grid points) and
/// bisection on alpha_1; for each trial alpha_1 the remaining alphas
/// follow by sequential elimination, and the root condition is that the
/// final power fraction is exhausted. The answer is re-verified against
/// the raw equations; residuals above `tol` raise SolverError, as do a
/// missing bracket or multiple brackets (reported rather than silently
/// picking one).
AlphaStar solve_alpha_star(const ChannelModel& ch, double tol = 1e-10);

/// Upper bound on the rates achievable by linear-feedback schemes with a
/// message point: (1/2) log(1 + alpha_1* P / ((1-alpha_1*) P + sigma_1^2)).
/// Strictly below capacity for K >= 2.
double linfb_upper_bound(const ChannelModel& ch);

/// Closed-form envelope of the same bound: (1/2) log(1 + P / sum_k N_k).
/// Tends to 0 as receivers accumulate whenever sum N_k diverges.
double prop2_envelope(const ChannelModel& ch);

/// Outer-bound rates for private messages at a given power split:
/// R_k = (1/2) log(1 + alpha_k P / ((1 - alpha_1 - ... - alpha_k) P + N_k)).
/// Requires every alpha in [0,1] with partial sums never exceeding 1.
std::vector<double> private_outer_rates(const ChannelModel& ch,
                                        const std::vector<double>& alphas);

}  // namespace gbc
