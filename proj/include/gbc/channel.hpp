#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace gbc {

/// Memoryless Gaussian broadcast channel: one input, K outputs, output k
/// being the input plus independent N(0, sigma_k^2) noise. Noise variances
/// are stored sorted in nonincreasing order (receiver 1 is the weakest);
/// the sorting permutation is kept so callers can map back to their
/// original receiver numbering. Immutable after construction.
class ChannelModel {
public:
    /// Validates power > 0 and every variance > 0 (errors name the
    /// offending 1-based index), then sorts the variances.
    ChannelModel(double power, std::vector<double> variances);

    double power() const { return power_; }
    int receivers() const { return static_cast<int>(variances_.size()); }
    /// k is 0-based over the sorted ordering.
    double variance(int k) const { return variances_.at(static_cast<std::size_t>(k)); }
    const std::vector<double>& variances() const { return variances_; }
    /// Entry i = 1-based original position of the variance stored in slot i.
    const std::vector<int>& sort_permutation() const { return permutation_; }

private:
    double power_;
    std::vector<double> variances_;
    std::vector<int> permutation_;
};

/// Convenience factory matching the constructor.
ChannelModel make_channel(double power, const std::vector<double>& variances);

/// One block of per-receiver noise: row k holds receiver k's samples for
/// n consecutive channel uses. Regenerating with the same seed reproduces
/// the block bit-exactly (see GaussianStream::generator_tag).
struct NoiseBlock {
    Eigen::MatrixXd samples;  // K x n
    std::uint64_t seed = 0;

    int receivers() const { return static_cast<int>(samples.rows()); }
    int length() const { return static_cast<int>(samples.cols()); }
};

/// Draws a K x n noise block, entry (k,i) ~ N(0, sigma_k^2), all entries
/// independent. The matrix is filled row by row from a single seeded
/// stream, so the block is a pure function of (ch, n, seed).
NoiseBlock sample_noise(const ChannelModel& ch, int n, std::uint64_t seed);

/// Broadcast transmission: output row k = x + noise row k.
Eigen::MatrixXd transmit(const Eigen::VectorXd& x, const NoiseBlock& noise);

/// (1/n) * sum x_i^2 of a nonempty block.
double average_power(const Eigen::VectorXd& x);

}  // namespace gbc
