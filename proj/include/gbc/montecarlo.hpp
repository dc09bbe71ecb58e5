#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gbc/intermittent.hpp"

namespace gbc {

/// Summary of one trial, whatever the underlying experiment.
struct TrialOutcome {
    bool error = false;
    double power = 0.0;    // consumed energy per channel use
    double fb_nats = 0.0;  // feedback spent per receiver
    bool fb_pass = true;
    bool e1 = false, e2 = false, e3 = false;  // final-phase event tags, if any
};

/// A trial is a pure function of its seed; messages and noise are derived
/// from it inside the runner.
using TrialRunner = std::function<TrialOutcome(std::uint64_t seed)>;

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

/// 95% (by default) Wilson score interval; chosen over Wald for sane
/// behavior at the tiny error rates this code estimates.
WilsonInterval wilson_interval(long errors, long trials, double z = 1.959963984540054);

struct TrialReport {
    long trials = 0;
    long errors = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    double mean_power = 0.0;
    double power_stderr = 0.0;
    double mean_fb_nats = 0.0;
    bool fb_all_pass = true;
    long e1 = 0, e2 = 0, e3 = 0;
    std::uint64_t seed_base = 0;
};

/// Runs `trials` trials with seeds seed_base .. seed_base+trials-1 and
/// aggregates. A runner exception aborts with the failing seed attached
/// for reproduction. Requires trials >= 100.
TrialReport estimate_error(const TrialRunner& runner, long trials, std::uint64_t seed_base);

/// Cell seed derived from the base seed and a canonical encoding of the
/// cell's config, so permuting a sweep grid permutes its reports without
/// changing them.
std::uint64_t derive_cell_seed(std::uint64_t seed_base, const std::string& canonical_config);

/// Canonical (sorted-key, compact) JSON encoding of a protocol config.
std::string canonical_config_string(const IntermittentConfig& cfg);

/// Standard protocol trial: message uniform on 1..M from the seed, noise
/// from a decorrelated stream, error = any wrong final guess, event tags
/// from the final phase.
TrialRunner make_protocol_runner(std::shared_ptr<const ProtocolEngine> engine);

/// One report per config, seeded per cell via derive_cell_seed; order of
/// the result matches the input grid. Each cell's channel combines its own
/// power budget with the shared noise variances. Cell failures carry the
/// cell index.
std::vector<std::pair<std::string, TrialReport>> sweep(const std::vector<IntermittentConfig>& grid,
                                                       long trials, std::uint64_t seed_base,
                                                       const std::vector<double>& noise_variances);

}  // namespace gbc
