#include "gbc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gbc/errors.hpp"
#include "gbc/random.hpp"

namespace gbc {

ChannelModel::ChannelModel(double power, std::vector<double> variances) : power_(power) {
    if (!(power > 0.0) || !std::isfinite(power)) {
        throw ValidationError("channel power must be finite and > 0, got " + std::to_string(power));
    }
    if (variances.empty()) {
        throw ValidationError("channel needs at least one receiver");
    }
    for (std::size_t i = 0; i < variances.size(); ++i) {
        if (!(variances[i] > 0.0) || !std::isfinite(variances[i])) {
            throw ValidationError("noise variance at index " + std::to_string(i + 1) +
                                  " must be finite and > 0, got " + std::to_string(variances[i]));
        }
    }
    // Stable sort keeps equal variances in their original order.
    std::vector<int> order(variances.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return variances[static_cast<std::size_t>(a)] >
                                                variances[static_cast<std::size_t>(b)]; });
    variances_.reserve(variances.size());
    permutation_.reserve(variances.size());
    for (int idx : order) {
        variances_.push_back(variances[static_cast<std::size_t>(idx)]);
        permutation_.push_back(idx + 1);
    }
}

ChannelModel make_channel(double power, const std::vector<double>& variances) {
    return ChannelModel(power, variances);
}

NoiseBlock sample_noise(const ChannelModel& ch, int n, std::uint64_t seed) {
    if (n < 1) {
        throw ValidationError("noise block length must be >= 1, got " + std::to_string(n));
    }
    NoiseBlock block;
    block.seed = seed;
    block.samples.resize(ch.receivers(), n);
    GaussianStream g(seed);
    for (int k = 0; k < ch.receivers(); ++k) {
        const double sigma = std::sqrt(ch.variance(k));
        for (int i = 0; i < n; ++i) {
            block.samples(k, i) = sigma * g.next();
        }
    }
    return block;
}

Eigen::MatrixXd transmit(const Eigen::VectorXd& x, const NoiseBlock& noise) {
    if (x.size() != noise.samples.cols()) {
        throw ValidationError("input length " + std::to_string(x.size()) +
                              " does not match noise block length " +
                              std::to_string(noise.samples.cols()));
    }
    Eigen::MatrixXd y = noise.samples;
    y.rowwise() += x.transpose();
    return y;
}

double average_power(const Eigen::VectorXd& x) {
    if (x.size() == 0) {
        throw ValidationError("average power of an empty block is undefined");
    }
    return x.squaredNorm() / static_cast<double>(x.size());
}

}  // namespace gbc
