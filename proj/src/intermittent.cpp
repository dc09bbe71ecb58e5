#include "gbc/intermittent.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "gbc/errors.hpp"
#include "gbc/math_util.hpp"
#include "gbc/random.hpp"

namespace gbc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log x for the Q argument x = sqrt(P/gamma)/(2 sigma); above ~354 the
// argument's square overflows and the tail contributes exactly 0 at
// double precision.
constexpr double kMaxLogQArg = 354.0;

}  // namespace

void validate_config(const IntermittentConfig& cfg) {
    if (cfg.phases < 1) {
        throw ValidationError("phase count L must be >= 1");
    }
    if (cfg.message_count < 2) {
        throw ValidationError("message count must be >= 2");
    }
    if (!(cfg.power_budget > 0.0)) {
        throw ValidationError("power budget must be > 0");
    }
    if (cfg.fb_rate < 0.0) {
        throw ValidationError("feedback rate must be >= 0");
    }
    phase_schedule(cfg.blocklength, cfg.epsilon, cfg.phases);  // throws on bad n/epsilon/L
    const double needed = static_cast<double>(cfg.phases - 1) *
                          std::log(static_cast<double>(cfg.message_count)) /
                          static_cast<double>(cfg.blocklength);
    if (cfg.fb_rate < needed * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "feedback rate " << cfg.fb_rate << " below the (L-1) log(M)/n requirement "
            << needed;
        throw ValidationError(msg.str());
    }
    if (static_cast<int>(cfg.gamma.size()) != cfg.phases) {
        throw ValidationError("gamma list must have one entry per phase");
    }
    for (std::size_t i = 0; i < cfg.gamma.size(); ++i) {
        if (!(cfg.gamma[i] > 0.0 && cfg.gamma[i] <= 1.0)) {
            throw ValidationError("gamma_" + std::to_string(i + 1) + " must lie in (0,1]");
        }
        if (i > 0 && !(cfg.gamma[i] < cfg.gamma[i - 1])) {
            throw ValidationError("gamma values must be strictly decreasing");
        }
    }
    if (static_cast<int>(cfg.codebook_seeds.size()) != cfg.phases) {
        throw ValidationError("need one codebook seed per phase");
    }
}

std::vector<int> phase_schedule(int n, double epsilon, int phases) {
    if (phases < 1) {
        throw ValidationError("phase count L must be >= 1");
    }
    if (phases == 1) {
        if (n < 2) throw ValidationError("blocklength must be >= 2");
        return {n};
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ValidationError("epsilon must lie in (0,1)");
    }
    std::vector<int> bounds(static_cast<std::size_t>(phases));
    const double n1 = (1.0 - epsilon) * static_cast<double>(n);
    for (int l = 1; l <= phases; ++l) {
        const double exact =
            n1 + epsilon * static_cast<double>(n) * static_cast<double>(l - 1) /
                     static_cast<double>(phases - 1);
        bounds[static_cast<std::size_t>(l - 1)] = static_cast<int>(std::llround(exact));
    }
    bounds.back() = n;
    int prev = 0;
    for (int l = 1; l <= phases; ++l) {
        const int len = bounds[static_cast<std::size_t>(l - 1)] - prev;
        if (len < 2) {
            std::ostringstream msg;
            msg << "phase " << l << " has only " << len
                << " symbols after rounding; increase n or epsilon spacing";
            throw ValidationError(msg.str());
        }
        prev = bounds[static_cast<std::size_t>(l - 1)];
    }
    return bounds;
}

double shannon_exponent(double rate, double snr) {
    if (rate < 0.0 || !(snr > 0.0)) {
        throw ValidationError("shannon_exponent needs rate >= 0 and snr > 0");
    }
    return snr / 4.0 * (1.0 - std::sqrt(1.0 - std::exp(-2.0 * rate)));
}

GammaSequence gamma_recursion(const std::vector<double>& rho, const ChannelModel& ch,
                              double power) {
    if (rho.empty()) {
        throw ValidationError("need at least one phase error bound");
    }
    if (!(power > 0.0)) {
        throw ValidationError("power must be > 0");
    }
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] >= 0.0 && rho[i] <= 1.0)) {
            throw ValidationError("rho_" + std::to_string(i + 1) + " must lie in [0,1]");
        }
    }
    GammaSequence out;
    out.gamma.reserve(rho.size());
    out.log_gamma.reserve(rho.size());
    out.gamma.push_back(rho[0]);
    out.log_gamma.push_back(rho[0] > 0.0 ? std::log(rho[0]) : kNegInf);
    const double log_power = std::log(power);
    for (std::size_t l = 1; l < rho.size(); ++l) {
        const double log_prev = out.log_gamma[l - 1];
        const double log_rho = rho[l] > 0.0 ? std::log(rho[l]) : kNegInf;
        double log_tail = kNegInf;
        if (log_prev != kNegInf) {
            for (int k = 0; k < ch.receivers(); ++k) {
                const double log_arg =
                    0.5 * (log_power - log_prev) - std::log(2.0 * std::sqrt(ch.variance(k)));
                if (log_arg > kMaxLogQArg) continue;  // tail is exactly 0 at this precision
                log_tail = log_sum_exp(log_tail, log_q_function(std::exp(log_arg)));
            }
        }
        if (log_tail != kNegInf) log_tail += std::log(2.0);
        const double log_gamma = log_sum_exp(log_rho, log_tail);
        out.log_gamma.push_back(log_gamma);
        out.gamma.push_back(log_gamma == kNegInf ? 0.0 : std::exp(log_gamma));
    }
    return out;
}

Codebook build_codebook(long message_count, int length, double power, std::uint64_t seed) {
    if (message_count < 2) {
        throw ValidationError("codebook needs at least 2 codewords");
    }
    if (length < 1) {
        throw ValidationError("codeword length must be >= 1");
    }
    if (!(power > 0.0)) {
        throw ValidationError("codebook power must be > 0");
    }
    Codebook cb;
    cb.power = power;
    cb.seed = seed;
    cb.codewords.resize(message_count, length);
    GaussianStream g(seed);
    const double sigma = std::sqrt(power);
    for (long m = 0; m < message_count; ++m) {
        for (int i = 0; i < length; ++i) {
            cb.codewords(m, i) = sigma * g.next();
        }
    }
    // Per-codeword normalization to exactly the target average power.
    for (long m = 0; m < message_count; ++m) {
        const double avg = cb.codewords.row(m).squaredNorm() / static_cast<double>(length);
        if (avg > 0.0) {
            cb.codewords.row(m) *= std::sqrt(power / avg);
        }
    }
    return cb;
}

long nearest_codeword(const Codebook& cb, const Eigen::VectorXd& y) {
    if (y.size() != cb.length()) {
        throw ValidationError("received vector length does not match the codebook");
    }
    long best = 1;
    double best_dist = (y.transpose() - cb.codewords.row(0)).squaredNorm();
    for (long m = 1; m < cb.size(); ++m) {
        const double dist = (y.transpose() - cb.codewords.row(m)).squaredNorm();
        if (dist < best_dist) {  // strict: ties keep the smaller index
            best = m + 1;
            best_dist = dist;
        }
    }
    return best;
}

ProtocolEngine::ProtocolEngine(IntermittentConfig cfg, ChannelModel ch)
    : cfg_(std::move(cfg)), ch_(std::move(ch)) {
    validate_config(cfg_);
    boundaries_ = phase_schedule(cfg_.blocklength, cfg_.epsilon, cfg_.phases);
    codebooks_.reserve(static_cast<std::size_t>(cfg_.phases));
    codebooks_.push_back(build_codebook(cfg_.message_count, boundaries_[0], cfg_.power_budget,
                                        cfg_.codebook_seeds[0]));
    for (int l = 2; l <= cfg_.phases; ++l) {
        const int seg = boundaries_[static_cast<std::size_t>(l - 1)] -
                        boundaries_[static_cast<std::size_t>(l - 2)];
        // One slot of each retransmission segment is the error signal.
        codebooks_.push_back(build_codebook(
            cfg_.message_count, seg - 1,
            cfg_.power_budget / cfg_.gamma[static_cast<std::size_t>(l - 2)],
            cfg_.codebook_seeds[static_cast<std::size_t>(l - 1)]));
    }
}

const Codebook& ProtocolEngine::codebook(int phase) const {
    return codebooks_.at(static_cast<std::size_t>(phase - 1));
}

double ProtocolEngine::threshold(int l) const {
    if (l < 1 || l >= cfg_.phases) {
        throw ValidationError("threshold index must lie in 1..L-1");
    }
    return 0.5 * std::sqrt(cfg_.power_budget / cfg_.gamma[static_cast<std::size_t>(l - 1)]);
}

ProtocolTrace ProtocolEngine::run(long message, std::uint64_t noise_seed) const {
    const NoiseBlock block = sample_noise(ch_, cfg_.blocklength, noise_seed);
    return run_with_noise(message, block.samples);
}

ProtocolTrace ProtocolEngine::run_with_noise(long message, const Eigen::MatrixXd& noise) const {
    if (message < 1 || message > cfg_.message_count) {
        throw ValidationError("message index outside 1..M");
    }
    if (noise.rows() != ch_.receivers() || noise.cols() != cfg_.blocklength) {
        throw ValidationError("noise block must be K x n");
    }
    const int receivers = ch_.receivers();
    ProtocolTrace trace;
    trace.message = message;
    trace.fb_nats_per_receiver = static_cast<double>(cfg_.phases - 1) *
                                 std::log(static_cast<double>(cfg_.message_count));

    // Phase 1: plain forward transmission of the phase-1 codeword.
    {
        PhaseRecord rec;
        rec.phase = 1;
        const int len = boundaries_[0];
        rec.inputs = codebooks_[0].codewords.row(message - 1).transpose();
        rec.energy = rec.inputs.squaredNorm();
        rec.outputs.resize(receivers, len);
        rec.guesses.resize(static_cast<std::size_t>(receivers));
        for (int k = 0; k < receivers; ++k) {
            rec.outputs.row(k) = rec.inputs.transpose() + noise.row(k).head(len);
            rec.guesses[static_cast<std::size_t>(k)] =
                nearest_codeword(codebooks_[0], rec.outputs.row(k).transpose());
        }
        trace.total_energy += rec.energy;
        trace.phases.push_back(std::move(rec));
    }

    for (int l = 2; l <= cfg_.phases; ++l) {
        const int start = boundaries_[static_cast<std::size_t>(l - 2)];
        const int stop = boundaries_[static_cast<std::size_t>(l - 1)];
        const int len = stop - start;
        const std::vector<long>& prev = trace.phases.back().guesses;
        bool some_wrong = false;
        for (long g : prev) some_wrong |= (g != message);

        PhaseRecord rec;
        rec.phase = l;
        rec.error_signal_sent = some_wrong;
        rec.inputs = Eigen::VectorXd::Zero(len);
        const double gamma_prev = cfg_.gamma[static_cast<std::size_t>(l - 2)];
        const double amplitude = std::sqrt(cfg_.power_budget / gamma_prev);
        const double t = 0.5 * amplitude;
        if (some_wrong) {
            rec.inputs(0) = amplitude;
            rec.inputs.tail(len - 1) =
                codebooks_[static_cast<std::size_t>(l - 1)].codewords.row(message - 1);
            rec.energy = rec.inputs.squaredNorm();
        }
        rec.outputs.resize(receivers, len);
        rec.guesses.resize(static_cast<std::size_t>(receivers));
        rec.threshold_fired.resize(static_cast<std::size_t>(receivers));
        for (int k = 0; k < receivers; ++k) {
            rec.outputs.row(k) = rec.inputs.transpose() + noise.row(k).segment(start, len);
            const bool fired = rec.outputs(k, 0) >= t;
            rec.threshold_fired[static_cast<std::size_t>(k)] = fired ? 1 : 0;
            if (fired) {
                rec.guesses[static_cast<std::size_t>(k)] =
                    nearest_codeword(codebooks_[static_cast<std::size_t>(l - 1)],
                                     rec.outputs.row(k).tail(len - 1).transpose());
            } else {
                rec.guesses[static_cast<std::size_t>(k)] = prev[static_cast<std::size_t>(k)];
            }
        }
        trace.total_energy += rec.energy;
        trace.phases.push_back(std::move(rec));
    }

    trace.final_guesses = trace.phases.back().guesses;
    return trace;
}

ProtocolTrace run_protocol(const IntermittentConfig& cfg, long message, const ChannelModel& ch,
                           std::uint64_t noise_seed) {
    return ProtocolEngine(cfg, ch).run(message, noise_seed);
}

std::vector<EventTags> classify_error_events(const ProtocolTrace& trace, long true_message) {
    std::vector<EventTags> tags;
    for (std::size_t l = 1; l < trace.phases.size(); ++l) {
        const PhaseRecord& prev = trace.phases[l - 1];
        const PhaseRecord& cur = trace.phases[l];
        EventTags tag;
        bool all_prev_correct = true;
        for (long g : prev.guesses) all_prev_correct &= (g == true_message);
        bool any_fired = false;
        for (std::size_t k = 0; k < cur.threshold_fired.size(); ++k) {
            const bool fired = cur.threshold_fired[k] != 0;
            any_fired |= fired;
            const bool prev_wrong = prev.guesses[k] != true_message;
            if (prev_wrong && !fired) tag.e2 = true;
            if (fired && cur.guesses[k] != true_message && !all_prev_correct) tag.e3 = true;
        }
        tag.e1 = all_prev_correct && any_fired;
        tags.push_back(tag);
    }
    return tags;
}

FeedbackBudget feedback_budget(const ProtocolTrace& trace, const IntermittentConfig& cfg) {
    FeedbackBudget out;
    // Guesses are sent after phases 1..L-1; every other feedback symbol is
    // deterministically zero (log-cardinality 0).
    out.used_nats = trace.fb_nats_per_receiver;
    out.limit_nats = static_cast<double>(cfg.blocklength) * cfg.fb_rate;
    const double slack = 1e-9 * std::max(1.0, std::abs(out.limit_nats));
    out.pass = out.used_nats <= out.limit_nats + slack;
    return out;
}

DecayPoint decay_point_from_gamma(double n, double gamma) {
    DecayPoint p;
    p.n = n;
    if (gamma > 0.0 && gamma < 1.0) {
        p.neg_log_gamma = -std::log(gamma);
    } else {
        p.neg_log_gamma = std::numeric_limits<double>::quiet_NaN();
    }
    return p;
}

DecayPoint decay_point_from_log_gamma(double n, double log_gamma) {
    DecayPoint p;
    p.n = n;
    if (log_gamma < 0.0 && std::isfinite(log_gamma)) {
        p.neg_log_gamma = -log_gamma;
    } else {
        p.neg_log_gamma = std::numeric_limits<double>::quiet_NaN();
    }
    return p;
}

DecayReport decay_order_diagnostic(const std::vector<DecayPoint>& points, int order) {
    if (order < 1) {
        throw ValidationError("decay order must be >= 1");
    }
    if (points.size() < 4) {
        throw ValidationError("decay diagnostic needs at least 4 points");
    }
    DecayReport report;
    report.usable.assign(points.size(), 0);
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double value = points[i].neg_log_gamma;
        // gamma must lie in (0,1); every log but the last needs a positive
        // input, while the final transform only has to stay finite.
        bool ok = std::isfinite(value) && value > 0.0;
        for (int applied = 0; ok && applied < order - 1; ++applied) {
            if (!(value > 0.0)) {
                ok = false;
                break;
            }
            value = std::log(value);
            ok = std::isfinite(value);
        }
        if (ok) {
            report.usable[i] = 1;
            xs.push_back(points[i].n);
            ys.push_back(value);
        }
    }
    report.usable_points = static_cast<int>(xs.size());
    if (xs.size() < 2) {
        throw SolverError("decay diagnostic has fewer than 2 usable points");
    }
    const double count = static_cast<double>(xs.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= count;
    mean_y /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        throw SolverError("decay diagnostic needs at least 2 distinct n values");
    }
    report.slope = sxy / sxx;
    report.intercept = mean_y - report.slope * mean_x;
    report.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return report;
}

}  // namespace gbc
