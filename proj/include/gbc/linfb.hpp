#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gbc/channel.hpp"

namespace gbc {

/// One blocklength-n linear-feedback code with a message point: the input
/// block is X = theta * d + sum_k A_k Z_k, with every A_k strictly lower
/// triangular so that only past noise (recovered from feedback) enters
/// each symbol.
struct LinearFeedbackScheme {
    int n = 0;
    Eigen::VectorXd d;
    std::vector<Eigen::MatrixXd> a_mats;   // one n x n matrix per receiver
    double theta_variance = 0.0;           // E|theta|^2

    int receivers() const { return static_cast<int>(a_mats.size()); }
};

/// Outcome of validate_scheme: the power expended by the matrices and the
/// message-point direction against the n*P budget.
struct SchemeReport {
    double power_lhs = 0.0;     // sum_k ||A_k||_F^2 sigma_k^2 + ||d||^2 E|theta|^2
    double power_budget = 0.0;  // n * P
    bool power_ok = false;
};

/// Checks strict lower-triangularity (throwing with the offending (k,i,j),
/// 1-based) and reports the power identity against n*P.
SchemeReport validate_scheme(const LinearFeedbackScheme& s, const ChannelModel& ch);

/// Matrix-form encoder: x = theta * d + sum_k A_k * (noise row k).
/// Equals the symbol-by-symbol causal evaluation because the A_k are
/// strictly lower triangular.
Eigen::VectorXd encode_linear(const LinearFeedbackScheme& s, double theta,
                              const NoiseBlock& noise);

/// Per-receiver noise coefficient of a scheme under combining vectors v:
///   c_k = sigma_k^2 ||v_k (I + A_k)||^2 + sum_{k' != k} sigma_k'^2 ||v_k' A_k'||^2.
/// Each v_k must be unit norm (tolerance 1e-9).
std::vector<double> c_coefficient(const std::vector<Eigen::MatrixXd>& a_mats,
                                  const std::vector<Eigen::RowVectorXd>& v,
                                  const ChannelModel& ch);

/// Multi-letter rate characterization: -(1/2n) log c_k.
double multiletter_rate(double c_k, int n);

/// Message point for index m out of M: value = 1/2 - (m-1)/M, a lattice
/// in (-1/2, 1/2] with spacing exactly 1/M.
struct MessagePoint {
    double value = 0.0;
    long message_index = 0;
};

MessagePoint message_point(long m, long message_count);

/// Exact variance of a uniformly drawn message point: (M^2 - 1) / (12 M^2).
double message_point_variance(long message_count);

/// floor(exp(total_blocklength * rate)); throws if it overflows a long.
long message_count_for_rate(double rate, int total_blocklength);

/// Chronological slot label for the blocklength-(n+2K) construction:
/// K initialization slots (1-K .. 0), n regular slots (1 .. n), and one
/// extra slot right after regular slot j_k for each receiver k.
struct Slot {
    enum class Kind { init, regular, extra };
    Kind kind = Kind::regular;
    int id = 0;  // receiver k (1-based) for init/extra, regular index i (1-based) otherwise

    std::string label() const;
};

/// The private-message construction built from a common scheme's matrices:
/// init slots carry the scaled message points, regular slots replay the
/// base scheme's noise combinations (with receiver k's slot-j_k noise
/// swapped for the extra-slot noise), and extra slot ~j_k repeats the
/// regular input j_k plus receiver k's init-slot noise.
struct PrivateScheme {
    int n = 0;
    std::vector<Eigen::MatrixXd> a_mats;
    std::vector<Eigen::RowVectorXd> v;   // unit-norm combining vectors
    std::vector<int> j;                  // 1-based, nondecreasing
    std::vector<double> rates;           // nats/symbol over the n+2K block
    std::vector<long> message_counts;    // floor(exp((n+2K) R_k))
    std::vector<double> theta_variances;
    std::vector<Slot> slots;             // chronological layout, size n+2K
    std::vector<int> init_slot;          // receiver k (0-based) -> position
    std::vector<int> regular_slot;       // regular index i (0-based) -> position
    std::vector<int> extra_slot;         // receiver k (0-based) -> position

    int receivers() const { return static_cast<int>(a_mats.size()); }
    int total_blocklength() const { return n + 2 * receivers(); }
    /// Amplitude applied to theta_k in the init slot (0 for a single message).
    double init_scale(int k, const ChannelModel& ch) const;
};

PrivateScheme construct_private_scheme(const std::vector<Eigen::MatrixXd>& a_mats,
                                       const std::vector<Eigen::RowVectorXd>& v,
                                       const std::vector<int>& j, const ChannelModel& ch,
                                       const std::vector<double>& rates);

/// Every (input slot, observed noise slot) pair the encoder depends on;
/// causality holds iff every edge points strictly backward in time.
std::vector<std::pair<int, int>> dependence_edges(const PrivateScheme& s);

/// LMMSE machinery for estimating the init-slot noise Z_{k,1-k} from the
/// receiver's n-vector of useful outputs. error_variance and mutual_info
/// satisfy error_variance = sigma_k^2 exp(-2 mutual_info) by construction.
struct LmmseCoefficients {
    Eigen::VectorXd weights;
    double error_variance = 0.0;
    double mutual_info = 0.0;
    bool regularized = false;  // set when the observation covariance needed a ridge
};

/// Solves the normal equations for given moments (observation covariance,
/// cross covariance, prior variance). Singular covariances get a ridge of
/// 1e-12 * trace / n and are flagged.
LmmseCoefficients lmmse_from_moments(Eigen::MatrixXd covariance, const Eigen::VectorXd& cross,
                                     double prior_variance);

LmmseCoefficients lmmse_coefficients(const PrivateScheme& s, int k, const ChannelModel& ch);

struct LmmseEstimate {
    double estimate = 0.0;
    double error_variance = 0.0;
    double mutual_info = 0.0;
    bool regularized = false;
};

/// Estimate of Z_{k,1-k} given y_tilde (receiver k's useful outputs in
/// base-scheme coordinates, i.e. regular outputs with position j_k holding
/// the extra-slot output).
LmmseEstimate lmmse_noise_estimate(const PrivateScheme& s, int k,
                                   const Eigen::VectorXd& y_tilde, const ChannelModel& ch);

/// Full decoder for receiver k from its n+2K chronological outputs:
/// theta_hat = sqrt(Var theta / P) (Y_init - Z_hat), then nearest message
/// point with ties broken toward the smaller index.
long decode_private(const PrivateScheme& s, int k, const Eigen::VectorXd& outputs,
                    const ChannelModel& ch);

/// Nearest message point to a given estimate; ties go to the smaller index.
long nearest_message_index(double theta_hat, long message_count);

/// Analytic upper bound on Pr[decoded message wrong] for receiver k:
///   2 Q( e^I / (2 M_k) * sqrt(P / (Var theta_k sigma_k^2)) ).
/// Returns 0 when the receiver carries a single message.
double private_error_bound(const PrivateScheme& s, int k, const ChannelModel& ch);

/// Projection bound on the mutual information (data processing): the exact
///   I(Z_{k,1-k}; v^T Ytilde_k)
/// = (1/2) log(1 + sigma_k^2 v_{j_k}^2 / (sigma_k^2 ||v (I+A_k)||^2
///     + sum_{k' != k} sigma_k'^2 ||v A_k'||^2)),
/// never above the full-vector mutual information.
double projected_mutual_info(const std::vector<Eigen::MatrixXd>& a_mats,
                             const Eigen::RowVectorXd& v_k, int j_k, int k,
                             const ChannelModel& ch);

/// The c_k-based form (1/2) log(1 + v_{k,j_k}^2 / c_k). Coincides with
/// projected_mutual_info at unit noise variances when every receiver uses
/// the same combining vector; in general it is a reporting quantity tied
/// to c_coefficient, not a certified bound.
double dpi_lower_bound(const Eigen::RowVectorXd& v_k, double c_k, int j_k);

/// Default combining vectors: the LMMSE combiner for the base scheme's
/// message point at each receiver, normalized, with j_k the position of
/// its largest-magnitude entry.
struct Combiners {
    std::vector<Eigen::RowVectorXd> v;
    std::vector<int> j;  // 1-based
};

Combiners default_combiners(const LinearFeedbackScheme& base, const ChannelModel& ch);

/// Analytic expected energy of the construction, split by slot class.
/// regular_energy is sum_k ||A_k||_F^2 sigma_k^2; slot_powers[k] is
/// E|X_{j_k}|^2, the regular-slot power repeated in the extra slot.
struct PrivatePowerReport {
    double init_energy = 0.0;
    double regular_energy = 0.0;
    double extra_energy = 0.0;
    std::vector<double> slot_powers;

    double total() const { return init_energy + regular_energy + extra_energy; }
};

PrivatePowerReport analytic_power(const PrivateScheme& s, const ChannelModel& ch);

/// One simulated transmission of the construction.
struct PrivateTrial {
    std::vector<long> decoded;
    std::vector<double> theta;      // transmitted message points
    std::vector<double> theta_hat;
    std::vector<double> z_true;     // init-slot noise per receiver
    std::vector<double> z_est;      // its LMMSE estimate
    std::vector<Eigen::VectorXd> y_tilde;
    Eigen::VectorXd inputs;         // all n+2K channel inputs
};

PrivateTrial simulate_private_trial(const PrivateScheme& s, const ChannelModel& ch,
                                    const std::vector<long>& messages, std::uint64_t seed,
                                    const std::vector<LmmseCoefficients>* coeffs = nullptr);

/// Same, with the noise block supplied explicitly (K x (n+2K)); used for
/// forced-noise fixtures.
PrivateTrial simulate_private_trial_with_noise(const PrivateScheme& s, const ChannelModel& ch,
                                               const std::vector<long>& messages,
                                               const Eigen::MatrixXd& noise,
                                               const std::vector<LmmseCoefficients>* coeffs = nullptr);

}  // namespace gbc
