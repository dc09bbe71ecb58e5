#include "gbc/linfb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gbc/errors.hpp"
#include "gbc/math_util.hpp"

namespace gbc {

namespace {

// Throws with the 1-based (k, i, j) of the first entry breaking strict
// lower-triangularity.
void check_strictly_lower(const std::vector<Eigen::MatrixXd>& a_mats) {
    for (std::size_t k = 0; k < a_mats.size(); ++k) {
        const Eigen::MatrixXd& a = a_mats[k];
        if (a.rows() != a.cols()) {
            throw ValidationError("A_" + std::to_string(k + 1) + " is not square");
        }
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index j = i; j < a.cols(); ++j) {
                if (a(i, j) != 0.0) {
                    std::ostringstream msg;
                    msg << "feedback matrix must be strictly lower triangular: A_" << (k + 1)
                        << " has nonzero entry at (" << (i + 1) << "," << (j + 1) << ")";
                    throw ValidationError(msg.str());
                }
            }
        }
    }
}

void check_unit_norm(const std::vector<Eigen::RowVectorXd>& v, int n) {
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k].size() != n) {
            throw ValidationError("combining vector " + std::to_string(k + 1) +
                                  " has wrong length");
        }
        if (std::abs(v[k].norm() - 1.0) > 1e-9) {
            throw ValidationError("combining vector " + std::to_string(k + 1) +
                                  " is not unit norm (|v| = " + std::to_string(v[k].norm()) + ")");
        }
    }
}

// Noise vector seen by receiver k over the base-scheme coordinates: the
// regular-slot noises, except position j_k which carries the extra-slot
// sample instead.
Eigen::VectorXd substituted_noise(const PrivateScheme& s, const Eigen::MatrixXd& noise, int k) {
    Eigen::VectorXd z(s.n);
    for (int i = 0; i < s.n; ++i) {
        const int pos = (i + 1 == s.j[static_cast<std::size_t>(k)])
                            ? s.extra_slot[static_cast<std::size_t>(k)]
                            : s.regular_slot[static_cast<std::size_t>(i)];
        z(i) = noise(k, pos);
    }
    return z;
}

Eigen::VectorXd extract_y_tilde(const PrivateScheme& s, int k, const Eigen::VectorXd& outputs) {
    Eigen::VectorXd y(s.n);
    for (int i = 0; i < s.n; ++i) {
        const int pos = (i + 1 == s.j[static_cast<std::size_t>(k)])
                            ? s.extra_slot[static_cast<std::size_t>(k)]
                            : s.regular_slot[static_cast<std::size_t>(i)];
        y(i) = outputs(pos);
    }
    return y;
}

}  // namespace

SchemeReport validate_scheme(const LinearFeedbackScheme& s, const ChannelModel& ch) {
    if (s.receivers() != ch.receivers()) {
        throw ValidationError("scheme has " + std::to_string(s.receivers()) +
                              " feedback matrices but the channel has " +
                              std::to_string(ch.receivers()) + " receivers");
    }
    if (s.d.size() != s.n) {
        throw ValidationError("message-point direction has length " + std::to_string(s.d.size()) +
                              ", expected " + std::to_string(s.n));
    }
    for (const auto& a : s.a_mats) {
        if (a.rows() != s.n) {
            throw ValidationError("feedback matrix dimension does not match blocklength");
        }
    }
    if (s.theta_variance < 0.0) {
        throw ValidationError("E|theta|^2 must be nonnegative");
    }
    check_strictly_lower(s.a_mats);

    SchemeReport report;
    for (int k = 0; k < s.receivers(); ++k) {
        report.power_lhs += s.a_mats[static_cast<std::size_t>(k)].squaredNorm() * ch.variance(k);
    }
    report.power_lhs += s.d.squaredNorm() * s.theta_variance;
    report.power_budget = static_cast<double>(s.n) * ch.power();
    report.power_ok = report.power_lhs <= report.power_budget * (1.0 + 1e-12);
    return report;
}

Eigen::VectorXd encode_linear(const LinearFeedbackScheme& s, double theta,
                              const NoiseBlock& noise) {
    if (noise.receivers() != s.receivers() || noise.length() != s.n) {
        throw ValidationError("noise block dimensions do not match the scheme");
    }
    if (s.d.size() != s.n) {
        throw ValidationError("message-point direction length does not match blocklength");
    }
    Eigen::VectorXd x = theta * s.d;
    for (int k = 0; k < s.receivers(); ++k) {
        x += s.a_mats[static_cast<std::size_t>(k)] * noise.samples.row(k).transpose();
    }
    return x;
}

std::vector<double> c_coefficient(const std::vector<Eigen::MatrixXd>& a_mats,
                                  const std::vector<Eigen::RowVectorXd>& v,
                                  const ChannelModel& ch) {
    const int receivers = ch.receivers();
    if (static_cast<int>(a_mats.size()) != receivers || static_cast<int>(v.size()) != receivers) {
        throw ValidationError("need one matrix and one combining vector per receiver");
    }
    check_strictly_lower(a_mats);
    const int n = static_cast<int>(a_mats.front().rows());
    check_unit_norm(v, n);

    std::vector<double> c(static_cast<std::size_t>(receivers), 0.0);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    for (int k = 0; k < receivers; ++k) {
        double value = ch.variance(k) *
                       (v[static_cast<std::size_t>(k)] * (eye + a_mats[static_cast<std::size_t>(k)]))
                           .squaredNorm();
        for (int kp = 0; kp < receivers; ++kp) {
            if (kp == k) continue;
            value += ch.variance(kp) *
                     (v[static_cast<std::size_t>(kp)] * a_mats[static_cast<std::size_t>(kp)])
                         .squaredNorm();
        }
        c[static_cast<std::size_t>(k)] = value;
    }
    return c;
}

double multiletter_rate(double c_k, int n) {
    if (!(c_k > 0.0)) {
        throw ValidationError("c_k must be > 0, got " + std::to_string(c_k));
    }
    if (n < 1) {
        throw ValidationError("blocklength must be >= 1");
    }
    return -std::log(c_k) / (2.0 * static_cast<double>(n));
}

MessagePoint message_point(long m, long message_count) {
    if (message_count < 1) {
        throw ValidationError("message count must be >= 1");
    }
    if (m < 1 || m > message_count) {
        throw ValidationError("message index " + std::to_string(m) + " outside 1.." +
                              std::to_string(message_count));
    }
    MessagePoint p;
    p.message_index = m;
    p.value = 0.5 - static_cast<double>(m - 1) / static_cast<double>(message_count);
    return p;
}

double message_point_variance(long message_count) {
    if (message_count < 1) {
        throw ValidationError("message count must be >= 1");
    }
    const double m = static_cast<double>(message_count);
    return (m * m - 1.0) / (12.0 * m * m);
}

long message_count_for_rate(double rate, int total_blocklength) {
    if (rate < 0.0 || !std::isfinite(rate)) {
        throw ValidationError("rate must be finite and >= 0");
    }
    const double x = rate * static_cast<double>(total_blocklength);
    if (x > 43.0) {  // exp(43) already exceeds a signed 64-bit long
        throw ValidationError("message count floor(exp(" + std::to_string(x) +
                              ")) overflows; desk-scale rates only");
    }
    // Tiny relative bump so that rates derived from log(M)/len recover M
    // exactly instead of M-1 after rounding.
    return static_cast<long>(std::floor(std::exp(x) * (1.0 + 1e-12)));
}

std::string Slot::label() const {
    switch (kind) {
        case Kind::init:
            return "init" + std::to_string(1 - id);
        case Kind::regular:
            return "reg" + std::to_string(id);
        case Kind::extra:
            return "extra" + std::to_string(id);
    }
    return {};
}

double PrivateScheme::init_scale(int k, const ChannelModel& ch) const {
    const double var = theta_variances.at(static_cast<std::size_t>(k));
    if (var <= 0.0) return 0.0;  // single message: nothing to send
    return std::sqrt(ch.power() / var);
}

PrivateScheme construct_private_scheme(const std::vector<Eigen::MatrixXd>& a_mats,
                                       const std::vector<Eigen::RowVectorXd>& v,
                                       const std::vector<int>& j, const ChannelModel& ch,
                                       const std::vector<double>& rates) {
    const int receivers = ch.receivers();
    if (static_cast<int>(a_mats.size()) != receivers) {
        throw ValidationError("need one feedback matrix per receiver");
    }
    check_strictly_lower(a_mats);
    const int n = static_cast<int>(a_mats.front().rows());
    for (const auto& a : a_mats) {
        if (a.rows() != n) throw ValidationError("feedback matrices must share one blocklength");
    }
    if (static_cast<int>(v.size()) != receivers || static_cast<int>(j.size()) != receivers ||
        static_cast<int>(rates.size()) != receivers) {
        throw ValidationError("v, j and rates must each have one entry per receiver");
    }
    check_unit_norm(v, n);
    for (int k = 0; k < receivers; ++k) {
        const int jk = j[static_cast<std::size_t>(k)];
        if (jk < 1 || jk > n) {
            throw ValidationError("j_" + std::to_string(k + 1) + " = " + std::to_string(jk) +
                                  " outside 1.." + std::to_string(n));
        }
        if (k > 0 && jk < j[static_cast<std::size_t>(k - 1)]) {
            throw ValidationError("slot indices j must be nondecreasing (relabel receivers)");
        }
        if (!(rates[static_cast<std::size_t>(k)] >= 0.0)) {
            throw ValidationError("rate for receiver " + std::to_string(k + 1) +
                                  " must be >= 0");
        }
    }

    PrivateScheme s;
    s.n = n;
    s.a_mats = a_mats;
    s.v = v;
    s.j = j;
    s.rates = rates;
    const int total = n + 2 * receivers;
    s.message_counts.reserve(static_cast<std::size_t>(receivers));
    s.theta_variances.reserve(static_cast<std::size_t>(receivers));
    for (int k = 0; k < receivers; ++k) {
        const long count = message_count_for_rate(rates[static_cast<std::size_t>(k)], total);
        s.message_counts.push_back(count);
        s.theta_variances.push_back(message_point_variance(count));
    }

    // Chronological layout: init slots 1-K..0, then regular slots with the
    // extra slot of receiver k immediately after regular slot j_k.
    s.init_slot.assign(static_cast<std::size_t>(receivers), -1);
    s.regular_slot.assign(static_cast<std::size_t>(n), -1);
    s.extra_slot.assign(static_cast<std::size_t>(receivers), -1);
    int pos = 0;
    for (int k = receivers; k >= 1; --k) {
        s.slots.push_back({Slot::Kind::init, k});
        s.init_slot[static_cast<std::size_t>(k - 1)] = pos++;
    }
    for (int i = 1; i <= n; ++i) {
        s.slots.push_back({Slot::Kind::regular, i});
        s.regular_slot[static_cast<std::size_t>(i - 1)] = pos++;
        for (int k = 1; k <= receivers; ++k) {
            if (j[static_cast<std::size_t>(k - 1)] == i) {
                s.slots.push_back({Slot::Kind::extra, k});
                s.extra_slot[static_cast<std::size_t>(k - 1)] = pos++;
            }
        }
    }
    return s;
}

std::vector<std::pair<int, int>> dependence_edges(const PrivateScheme& s) {
    std::vector<std::pair<int, int>> edges;
    const int receivers = s.receivers();
    for (int i = 1; i <= s.n; ++i) {
        const int dst = s.regular_slot[static_cast<std::size_t>(i - 1)];
        for (int k = 0; k < receivers; ++k) {
            const Eigen::MatrixXd& a = s.a_mats[static_cast<std::size_t>(k)];
            for (int q = 1; q < i; ++q) {
                if (a(i - 1, q - 1) == 0.0) continue;
                const int src = (q == s.j[static_cast<std::size_t>(k)])
                                    ? s.extra_slot[static_cast<std::size_t>(k)]
                                    : s.regular_slot[static_cast<std::size_t>(q - 1)];
                edges.emplace_back(dst, src);
            }
        }
    }
    // Extra slot ~j_k repeats the regular input j_k and adds the init noise.
    for (int k = 0; k < receivers; ++k) {
        const int dst = s.extra_slot[static_cast<std::size_t>(k)];
        const int jk = s.j[static_cast<std::size_t>(k)];
        edges.emplace_back(dst, s.init_slot[static_cast<std::size_t>(k)]);
        for (int kp = 0; kp < receivers; ++kp) {
            const Eigen::MatrixXd& a = s.a_mats[static_cast<std::size_t>(kp)];
            for (int q = 1; q < jk; ++q) {
                if (a(jk - 1, q - 1) == 0.0) continue;
                const int src = (q == s.j[static_cast<std::size_t>(kp)])
                                    ? s.extra_slot[static_cast<std::size_t>(kp)]
                                    : s.regular_slot[static_cast<std::size_t>(q - 1)];
                edges.emplace_back(dst, src);
            }
        }
    }
    return edges;
}

LmmseCoefficients lmmse_from_moments(Eigen::MatrixXd covariance, const Eigen::VectorXd& cross,
                                     double prior_variance) {
    if (covariance.rows() != covariance.cols() || covariance.rows() != cross.size()) {
        throw ValidationError("LMMSE moment dimensions disagree");
    }
    if (!(prior_variance > 0.0)) {
        throw ValidationError("prior variance must be > 0");
    }
    LmmseCoefficients out;
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
        const double ridge =
            std::max(1e-12 * covariance.trace() / static_cast<double>(covariance.rows()), 1e-300);
        covariance.diagonal().array() += ridge;
        out.regularized = true;
        llt.compute(covariance);
        if (llt.info() != Eigen::Success) {
            throw SolverError("observation covariance not positive definite even after ridge");
        }
    }
    out.weights = llt.solve(cross);
    double err = prior_variance - cross.dot(out.weights);
    err = std::min(std::max(err, prior_variance * 1e-300), prior_variance);
    out.error_variance = err;
    out.mutual_info = 0.5 * std::log(prior_variance / err);
    // Keep the pair exactly on the var = sigma^2 exp(-2I) identity.
    out.error_variance = prior_variance * std::exp(-2.0 * out.mutual_info);
    return out;
}

LmmseCoefficients lmmse_coefficients(const PrivateScheme& s, int k, const ChannelModel& ch) {
    if (k < 0 || k >= s.receivers()) {
        throw ValidationError("receiver index out of range");
    }
    const int n = s.n;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (int kp = 0; kp < s.receivers(); ++kp) {
        const Eigen::MatrixXd& a = s.a_mats[static_cast<std::size_t>(kp)];
        if (kp == k) {
            const Eigen::MatrixXd m = eye + a;
            cov += ch.variance(kp) * m * m.transpose();
        } else {
            cov += ch.variance(kp) * a * a.transpose();
        }
    }
    const int jk = s.j[static_cast<std::size_t>(k)];
    cov(jk - 1, jk - 1) += ch.variance(k);
    Eigen::VectorXd cross = Eigen::VectorXd::Zero(n);
    cross(jk - 1) = ch.variance(k);
    return lmmse_from_moments(std::move(cov), cross, ch.variance(k));
}

LmmseEstimate lmmse_noise_estimate(const PrivateScheme& s, int k, const Eigen::VectorXd& y_tilde,
                                   const ChannelModel& ch) {
    if (y_tilde.size() != s.n) {
        throw ValidationError("observation vector length does not match the scheme");
    }
    const LmmseCoefficients coeffs = lmmse_coefficients(s, k, ch);
    LmmseEstimate est;
    est.estimate = coeffs.weights.dot(y_tilde);
    est.error_variance = coeffs.error_variance;
    est.mutual_info = coeffs.mutual_info;
    est.regularized = coeffs.regularized;
    return est;
}

long nearest_message_index(double theta_hat, long message_count) {
    if (message_count <= 1) return 1;
    const double m = static_cast<double>(message_count);
    const double pos = (0.5 - theta_hat) * m + 1.0;
    long center = std::lround(pos);
    center = std::max(1L, std::min(message_count, center));
    long best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    // Ascending scan with strict improvement breaks ties toward the
    // smaller index.
    for (long c = std::max(1L, center - 2); c <= std::min(message_count, center + 2); ++c) {
        const double dist = std::abs(theta_hat - message_point(c, message_count).value);
        if (dist < best_dist) {
            best = c;
            best_dist = dist;
        }
    }
    return best;
}

long decode_private(const PrivateScheme& s, int k, const Eigen::VectorXd& outputs,
                    const ChannelModel& ch) {
    if (outputs.size() != s.total_blocklength()) {
        throw ValidationError("expected " + std::to_string(s.total_blocklength()) +
                              " outputs, got " + std::to_string(outputs.size()));
    }
    const long count = s.message_counts[static_cast<std::size_t>(k)];
    if (count <= 1) return 1;
    const Eigen::VectorXd y_tilde = extract_y_tilde(s, k, outputs);
    const LmmseEstimate est = lmmse_noise_estimate(s, k, y_tilde, ch);
    const double y_init = outputs(s.init_slot[static_cast<std::size_t>(k)]);
    const double theta_hat =
        std::sqrt(s.theta_variances[static_cast<std::size_t>(k)] / ch.power()) *
        (y_init - est.estimate);
    return nearest_message_index(theta_hat, count);
}

double private_error_bound(const PrivateScheme& s, int k, const ChannelModel& ch) {
    const long count = s.message_counts[static_cast<std::size_t>(k)];
    if (count <= 1) return 0.0;
    const LmmseCoefficients coeffs = lmmse_coefficients(s, k, ch);
    const double var = s.theta_variances[static_cast<std::size_t>(k)];
    const double arg = std::exp(coeffs.mutual_info) / (2.0 * static_cast<double>(count)) *
                       std::sqrt(ch.power() / (var * ch.variance(k)));
    return 2.0 * q_function(arg);
}

double projected_mutual_info(const std::vector<Eigen::MatrixXd>& a_mats,
                             const Eigen::RowVectorXd& v_k, int j_k, int k,
                             const ChannelModel& ch) {
    const int n = static_cast<int>(a_mats.front().rows());
    if (v_k.size() != n || j_k < 1 || j_k > n) {
        throw ValidationError("combining vector or slot index out of range");
    }
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    double denom = 0.0;
    for (int kp = 0; kp < static_cast<int>(a_mats.size()); ++kp) {
        if (kp == k) {
            denom += ch.variance(kp) * (v_k * (eye + a_mats[static_cast<std::size_t>(kp)])).squaredNorm();
        } else {
            denom += ch.variance(kp) * (v_k * a_mats[static_cast<std::size_t>(kp)]).squaredNorm();
        }
    }
    const double num = ch.variance(k) * v_k(j_k - 1) * v_k(j_k - 1);
    return 0.5 * std::log1p(num / denom);
}

double dpi_lower_bound(const Eigen::RowVectorXd& v_k, double c_k, int j_k) {
    if (!(c_k > 0.0)) {
        throw ValidationError("c_k must be > 0");
    }
    if (j_k < 1 || j_k > v_k.size()) {
        throw ValidationError("slot index out of range");
    }
    const double num = v_k(j_k - 1) * v_k(j_k - 1);
    return 0.5 * std::log1p(num / c_k);
}

Combiners default_combiners(const LinearFeedbackScheme& base, const ChannelModel& ch) {
    if (base.theta_variance <= 0.0 || base.d.squaredNorm() == 0.0) {
        throw ValidationError(
            "default combiners need a base scheme with a nonzero message-point direction");
    }
    check_strictly_lower(base.a_mats);
    const int n = base.n;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    Combiners out;
    for (int k = 0; k < base.receivers(); ++k) {
        Eigen::MatrixXd cov = base.theta_variance * base.d * base.d.transpose();
        for (int kp = 0; kp < base.receivers(); ++kp) {
            const Eigen::MatrixXd& a = base.a_mats[static_cast<std::size_t>(kp)];
            if (kp == k) {
                const Eigen::MatrixXd m = eye + a;
                cov += ch.variance(kp) * m * m.transpose();
            } else {
                cov += ch.variance(kp) * a * a.transpose();
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) {
            cov.diagonal().array() += std::max(1e-12 * cov.trace() / n, 1e-300);
            llt.compute(cov);
            if (llt.info() != Eigen::Success) {
                throw SolverError("combiner covariance not positive definite");
            }
        }
        Eigen::VectorXd w = llt.solve(base.d);
        const double norm = w.norm();
        if (!(norm > 0.0)) {
            throw SolverError("combining vector degenerated to zero");
        }
        Eigen::RowVectorXd v = (w / norm).transpose();
        int best = 0;
        for (int i = 1; i < n; ++i) {
            if (std::abs(v(i)) > std::abs(v(best))) best = i;
        }
        out.v.push_back(std::move(v));
        out.j.push_back(best + 1);
    }
    return out;
}

PrivatePowerReport analytic_power(const PrivateScheme& s, const ChannelModel& ch) {
    PrivatePowerReport report;
    const int receivers = s.receivers();
    for (int k = 0; k < receivers; ++k) {
        const long count = s.message_counts[static_cast<std::size_t>(k)];
        const double scale = s.init_scale(k, ch);
        // E|theta|^2 = Var(theta) + mean^2 with the lattice mean 1/(2M).
        const double mean = 0.5 / static_cast<double>(count);
        const double second_moment =
            s.theta_variances[static_cast<std::size_t>(k)] + mean * mean;
        report.init_energy += scale * scale * second_moment;
    }
    for (int k = 0; k < receivers; ++k) {
        report.regular_energy += s.a_mats[static_cast<std::size_t>(k)].squaredNorm() * ch.variance(k);
    }
    report.slot_powers.assign(static_cast<std::size_t>(receivers), 0.0);
    for (int k = 0; k < receivers; ++k) {
        const int jk = s.j[static_cast<std::size_t>(k)];
        double slot_power = 0.0;
        for (int kp = 0; kp < receivers; ++kp) {
            slot_power += ch.variance(kp) *
                          s.a_mats[static_cast<std::size_t>(kp)].row(jk - 1).squaredNorm();
        }
        report.slot_powers[static_cast<std::size_t>(k)] = slot_power;
        report.extra_energy += slot_power + ch.variance(k);
    }
    return report;
}

PrivateTrial simulate_private_trial(const PrivateScheme& s, const ChannelModel& ch,
                                    const std::vector<long>& messages, std::uint64_t seed,
                                    const std::vector<LmmseCoefficients>* coeffs) {
    const NoiseBlock block = sample_noise(ch, s.total_blocklength(), seed);
    return simulate_private_trial_with_noise(s, ch, messages, block.samples, coeffs);
}

PrivateTrial simulate_private_trial_with_noise(const PrivateScheme& s, const ChannelModel& ch,
                                               const std::vector<long>& messages,
                                               const Eigen::MatrixXd& noise,
                                               const std::vector<LmmseCoefficients>* coeffs) {
    const int receivers = s.receivers();
    const int total = s.total_blocklength();
    if (static_cast<int>(messages.size()) != receivers) {
        throw ValidationError("need one message per receiver");
    }
    if (noise.rows() != receivers || noise.cols() != total) {
        throw ValidationError("noise block must be K x (n + 2K)");
    }

    PrivateTrial trial;
    trial.inputs = Eigen::VectorXd::Zero(total);
    trial.theta.resize(static_cast<std::size_t>(receivers));

    // Initialization slots carry the scaled message points.
    for (int k = 0; k < receivers; ++k) {
        const long count = s.message_counts[static_cast<std::size_t>(k)];
        const long m = messages[static_cast<std::size_t>(k)];
        const double theta = message_point(m, count).value;
        trial.theta[static_cast<std::size_t>(k)] = theta;
        trial.inputs(s.init_slot[static_cast<std::size_t>(k)]) = s.init_scale(k, ch) * theta;
    }

    // Regular slots replay the base scheme on the substituted noises.
    Eigen::VectorXd x_reg = Eigen::VectorXd::Zero(s.n);
    for (int k = 0; k < receivers; ++k) {
        x_reg += s.a_mats[static_cast<std::size_t>(k)] * substituted_noise(s, noise, k);
    }
    for (int i = 0; i < s.n; ++i) {
        trial.inputs(s.regular_slot[static_cast<std::size_t>(i)]) = x_reg(i);
    }

    // Extra slot ~j_k repeats X_{j_k} plus receiver k's init-slot noise.
    for (int k = 0; k < receivers; ++k) {
        const int jk = s.j[static_cast<std::size_t>(k)];
        trial.inputs(s.extra_slot[static_cast<std::size_t>(k)]) =
            x_reg(jk - 1) + noise(k, s.init_slot[static_cast<std::size_t>(k)]);
    }

    for (int k = 0; k < receivers; ++k) {
        const Eigen::VectorXd outputs = trial.inputs + noise.row(k).transpose();
        const Eigen::VectorXd y_tilde = extract_y_tilde(s, k, outputs);
        LmmseCoefficients local;
        const LmmseCoefficients* c = nullptr;
        if (coeffs) {
            c = &coeffs->at(static_cast<std::size_t>(k));
        } else {
            local = lmmse_coefficients(s, k, ch);
            c = &local;
        }
        const double z_hat = c->weights.dot(y_tilde);
        const double y_init = outputs(s.init_slot[static_cast<std::size_t>(k)]);
        trial.z_true.push_back(noise(k, s.init_slot[static_cast<std::size_t>(k)]));
        trial.z_est.push_back(z_hat);
        trial.y_tilde.push_back(y_tilde);

        const long count = s.message_counts[static_cast<std::size_t>(k)];
        if (count <= 1) {
            trial.theta_hat.push_back(trial.theta[static_cast<std::size_t>(k)]);
            trial.decoded.push_back(1);
            continue;
        }
        const double theta_hat =
            std::sqrt(s.theta_variances[static_cast<std::size_t>(k)] / ch.power()) *
            (y_init - z_hat);
        trial.theta_hat.push_back(theta_hat);
        trial.decoded.push_back(nearest_message_index(theta_hat, count));
    }
    return trial;
}

}  // namespace gbc
