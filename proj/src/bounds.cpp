#include "gbc/bounds.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "gbc/errors.hpp"

namespace gbc {

namespace {

// Given alpha_1, eliminate alpha_2..alpha_K through the equal-rate
// condition and return the leftover power fraction beta_K = 1 - sum alpha.
// The common SNR ratio g = e^{2 R_1} - 1 is shared by every receiver, so
//   alpha_k = g (beta_{k-1} P + N_k) / ((1+g) P),  beta_k = beta_{k-1} - alpha_k.
// A root of beta_K in alpha_1 is exactly a solution of the system.
double beta_deficit(const ChannelModel& ch, const std::vector<double>& noises, double alpha1,
                    std::vector<double>* alphas_out = nullptr) {
    const double p = ch.power();
    const double g = alpha1 * p / ((1.0 - alpha1) * p + ch.variance(0));
    double beta = 1.0 - alpha1;
    if (alphas_out) {
        alphas_out->assign(1, alpha1);
    }
    for (int k = 1; k < ch.receivers(); ++k) {
        const double alpha_k = g * (beta * p + noises[static_cast<std::size_t>(k)]) / ((1.0 + g) * p);
        beta -= alpha_k;
        if (alphas_out) alphas_out->push_back(alpha_k);
    }
    return beta;
}

double rate_at(double p, double alpha, double remaining, double noise) {
    return 0.5 * std::log1p(alpha * p / (remaining * p + noise));
}

}  // namespace

double capacity(const ChannelModel& ch) {
    return 0.5 * std::log1p(ch.power() / ch.variance(0));
}

EffectiveNoises effective_noises(const ChannelModel& ch) {
    EffectiveNoises out;
    out.values.reserve(static_cast<std::size_t>(ch.receivers()));
    double inv_sum = 0.0;
    for (int k = 0; k < ch.receivers(); ++k) {
        inv_sum += 1.0 / ch.variance(k);
        out.values.push_back(1.0 / inv_sum);
    }
    return out;
}

AlphaStar solve_alpha_star(const ChannelModel& ch, double tol) {
    if (!(tol > 0.0)) {
        throw ValidationError("solver tolerance must be > 0");
    }
    AlphaStar result;
    if (ch.receivers() == 1) {
        // Boundary solution: the whole budget goes to the single receiver.
        result.alphas = {1.0};
        result.common_rate = capacity(ch);
        result.residuals = {0.0};
        result.degenerate = true;
        return result;
    }

    const std::vector<double> noises = effective_noises(ch).values;
    const double lo = tol;
    const double hi = 1.0 - tol;
    constexpr int kScanPoints = 1000;

    // Bracket the root of beta_K(alpha_1).
    std::vector<std::pair<double, double>> brackets;
    double prev_x = lo;
    double prev_f = beta_deficit(ch, noises, prev_x);
    double min_abs = std::abs(prev_f);
    for (int i = 1; i <= kScanPoints; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / kScanPoints;
        const double f = beta_deficit(ch, noises, x);
        if (prev_f == 0.0 || prev_f * f < 0.0) {
            brackets.emplace_back(prev_x, x);
        }
        min_abs = std::min(min_abs, std::abs(f));
        prev_x = x;
        prev_f = f;
    }
    if (brackets.empty()) {
        std::ostringstream msg;
        msg << "alpha* scan found no sign change over (" << lo << ", " << hi
            << ") at " << kScanPoints << " points; min |beta_K| = " << min_abs;
        throw SolverError(msg.str());
    }
    if (brackets.size() > 1) {
        // Uniqueness is not guaranteed by the theory; refuse to pick silently.
        std::ostringstream msg;
        msg << "alpha* scan found " << brackets.size() << " sign changes:";
        for (const auto& b : brackets) msg << " [" << b.first << ", " << b.second << "]";
        throw SolverError(msg.str());
    }

    double a = brackets[0].first;
    double b = brackets[0].second;
    double fa = beta_deficit(ch, noises, a);
    double mid = 0.5 * (a + b);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (a + b);
        const double fm = beta_deficit(ch, noises, mid);
        if (std::abs(fm) < 1e-12) break;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }

    std::vector<double> alphas;
    beta_deficit(ch, noises, mid, &alphas);

    // Re-verify directly against the raw equations.
    const double p = ch.power();
    double partial = 0.0;
    std::vector<double> rates(alphas.size());
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        partial += alphas[k];
        rates[k] = rate_at(p, alphas[k], 1.0 - partial, noises[k]);
    }
    result.alphas = alphas;
    result.common_rate = rates[0];
    result.residuals.assign(alphas.size(), 0.0);
    result.residuals[0] = std::abs(partial - 1.0);
    double worst = result.residuals[0];
    for (std::size_t k = 1; k < alphas.size(); ++k) {
        result.residuals[k] = std::abs(rates[k] - rates[0]);
        worst = std::max(worst, result.residuals[k]);
    }
    if (worst > tol) {
        std::ostringstream msg;
        msg << "alpha* solution verified poorly: max residual " << worst << " > tol " << tol;
        throw SolverError(msg.str());
    }
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        if (!(alphas[k] > 0.0 && alphas[k] < 1.0)) {
            std::ostringstream msg;
            msg << "alpha_" << (k + 1) << " = " << alphas[k] << " left the open interval (0,1)";
            throw SolverError(msg.str());
        }
    }
    return result;
}

double linfb_upper_bound(const ChannelModel& ch) {
    return solve_alpha_star(ch).common_rate;
}

double prop2_envelope(const ChannelModel& ch) {
    const EffectiveNoises noises = effective_noises(ch);
    double sum = 0.0;
    for (double n_k : noises.values) sum += n_k;
    return 0.5 * std::log1p(ch.power() / sum);
}

std::vector<double> private_outer_rates(const ChannelModel& ch,
                                        const std::vector<double>& alphas) {
    if (static_cast<int>(alphas.size()) != ch.receivers()) {
        throw ValidationError("expected " + std::to_string(ch.receivers()) +
                              " coefficients, got " + std::to_string(alphas.size()));
    }
    const std::vector<double> noises = effective_noises(ch).values;
    const double p = ch.power();
    std::vector<double> rates;
    rates.reserve(alphas.size());
    double partial = 0.0;
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        if (!(alphas[k] >= 0.0 && alphas[k] <= 1.0)) {
            throw ValidationError("alpha_" + std::to_string(k + 1) + " must lie in [0,1]");
        }
        partial += alphas[k];
        if (partial > 1.0 + 1e-12) {
            throw ValidationError("partial sum of alphas exceeds 1 at k = " + std::to_string(k + 1));
        }
        const double remaining = std::max(0.0, 1.0 - partial);
        rates.push_back(rate_at(p, alphas[k], remaining, noises[k]));
    }
    return rates;
}

}  // namespace gbc
