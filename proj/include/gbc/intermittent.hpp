#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gbc/channel.hpp"

namespace gbc {

/// Parameters of one L-phase retransmission protocol at desk scale:
/// explicit message count M instead of an asymptotic rate, gamma values
/// driving the error-signal amplitude sqrt(P/gamma_{l-1}) and detection
/// threshold T_{l-1} = sqrt(P/gamma_{l-1})/2 of each phase l >= 2.
struct IntermittentConfig {
    int phases = 1;                    // L
    int blocklength = 0;               // n, total channel uses
    double epsilon = 0.0;              // fraction of the block reserved for retransmissions
    long message_count = 2;            // M
    double power_budget = 0.0;         // P
    double fb_rate = 0.0;              // nats per channel use on each feedback link
    std::vector<double> gamma;         // gamma_1..gamma_L, strictly decreasing, in (0,1]
    std::vector<std::uint64_t> codebook_seeds;  // one per phase
};

/// Validates every config invariant (phase lengths >= 2 after rounding,
/// fb_rate >= (L-1) log(M)/n, gamma strictly decreasing in (0,1], seed
/// count) and throws ValidationError otherwise.
void validate_config(const IntermittentConfig& cfg);

/// Phase boundaries n_1..n_L: n_1 = (1-eps) n and
/// n_l = n_1 + eps*n*(l-1)/(L-1), each rounded to the nearest integer
/// (half away from zero), with n_L forced to n. Throws if any phase ends
/// up shorter than 2 symbols.
std::vector<int> phase_schedule(int n, double epsilon, int phases);

/// Random-coding error exponent for the Gaussian channel at a given rate
/// (nats) and SNR: (snr/4) (1 - sqrt(1 - e^{-2 rate})).
double shannon_exponent(double rate, double snr);

/// The gamma recursion: gamma_1 = rho_1 and
///   gamma_l = rho_l + 2 sum_k Q( sqrt(P/gamma_{l-1}) / (2 sigma_k) ).
/// Values are carried in the log domain as well, because at any
/// interesting blocklength gamma_2 underflows a double; log_gamma stays
/// finite until -log gamma itself overflows. gamma_{l-1} = 0 (or small
/// enough that the Q argument cannot be represented) short-circuits to
/// gamma_l = rho_l.
struct GammaSequence {
    std::vector<double> gamma;      // exp(log_gamma), may underflow to 0
    std::vector<double> log_gamma;  // -inf when the value is exactly 0
};

GammaSequence gamma_recursion(const std::vector<double>& rho, const ChannelModel& ch,
                              double power);

/// M codewords of a given blocklength, i.i.d. Gaussian entries scaled so
/// every codeword's average power is exactly `power` (removes ensemble
/// variance from desk-scale power accounting; the expected-power reading
/// is recovered on average). Bit-exact in the seed.
struct Codebook {
    Eigen::MatrixXd codewords;  // M x len
    double power = 0.0;
    std::uint64_t seed = 0;

    long size() const { return static_cast<long>(codewords.rows()); }
    int length() const { return static_cast<int>(codewords.cols()); }
};

Codebook build_codebook(long message_count, int length, double power, std::uint64_t seed);

/// Maximum-likelihood decoding for the AWGN channel: the index (1-based)
/// minimizing ||y - codeword||^2, ties toward the smaller index.
long nearest_codeword(const Codebook& cb, const Eigen::VectorXd& y);

/// Everything one phase leaves behind.
struct PhaseRecord {
    int phase = 1;                      // l, 1-based
    bool error_signal_sent = false;     // phase >= 2: some previous guess was wrong
    std::vector<long> guesses;          // temporary guesses after this phase
    std::vector<char> threshold_fired;  // phase >= 2: Y_{k,n_{l-1}+1} >= T_{l-1}
    double energy = 0.0;                // energy spent in this phase
    Eigen::VectorXd inputs;             // transmitted segment
    Eigen::MatrixXd outputs;            // K x segment length
};

struct ProtocolTrace {
    long message = 0;
    std::vector<PhaseRecord> phases;
    std::vector<long> final_guesses;    // = phase-L guesses
    double total_energy = 0.0;
    double fb_nats_per_receiver = 0.0;  // (L-1) log M
};

/// Immutable protocol instance: codebooks are built once from the config
/// seeds and shared across trials. run() is a pure function of
/// (message, noise seed).
class ProtocolEngine {
public:
    ProtocolEngine(IntermittentConfig cfg, ChannelModel ch);

    const IntermittentConfig& config() const { return cfg_; }
    const ChannelModel& channel() const { return ch_; }
    const std::vector<int>& boundaries() const { return boundaries_; }
    const Codebook& codebook(int phase) const;  // 1-based
    /// Detection threshold T_l = sqrt(P/gamma_l)/2 for l in 1..L-1.
    double threshold(int l) const;

    ProtocolTrace run(long message, std::uint64_t noise_seed) const;
    ProtocolTrace run_with_noise(long message, const Eigen::MatrixXd& noise) const;

private:
    IntermittentConfig cfg_;
    ChannelModel ch_;
    std::vector<int> boundaries_;
    std::vector<Codebook> codebooks_;
};

/// One-shot convenience wrapper around ProtocolEngine::run.
ProtocolTrace run_protocol(const IntermittentConfig& cfg, long message, const ChannelModel& ch,
                           std::uint64_t noise_seed);

/// Error-event tags for phase l >= 2:
///  e1: all phase-(l-1) guesses correct, yet some receiver's threshold fired;
///  e2: some receiver's phase-(l-1) guess wrong and its own threshold silent;
///  e3: some phase-(l-1) guess wrong, and some receiver that redecodes
///      (threshold fired) gets the retransmission wrong.
struct EventTags {
    bool e1 = false;
    bool e2 = false;
    bool e3 = false;
};

/// Tags for phases 2..L, in order (entry i covers phase i+2).
std::vector<EventTags> classify_error_events(const ProtocolTrace& trace, long true_message);

struct FeedbackBudget {
    double used_nats = 0.0;   // log-cardinality of every symbol actually sent
    double limit_nats = 0.0;  // n * R_fb
    bool pass = false;
};

FeedbackBudget feedback_budget(const ProtocolTrace& trace, const IntermittentConfig& cfg);

/// One point of a decay study. neg_log_gamma = -log gamma_L(n) keeps the
/// diagnostic usable long after gamma itself underflows a double; points
/// with gamma outside (0,1) carry NaN and are marked unusable.
struct DecayPoint {
    double n = 0.0;
    double neg_log_gamma = 0.0;
};

DecayPoint decay_point_from_gamma(double n, double gamma);
DecayPoint decay_point_from_log_gamma(double n, double log_gamma);

struct DecayReport {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int usable_points = 0;
    std::vector<char> usable;  // one flag per input point
};

/// Applies log (order-1) times to -log gamma_L(n) and regresses the result
/// against n. A positive slope with a good fit certifies order-fold
/// exponential decay. Points whose transforms leave the positive reals are
/// marked unusable; fewer than two usable points is an error.
DecayReport decay_order_diagnostic(const std::vector<DecayPoint>& points, int order);

}  // namespace gbc
