#include "gbc/montecarlo.hpp"

#include <cmath>
#include <sstream>

#include "gbc/errors.hpp"
#include "gbc/random.hpp"
#include "gbc/serialize.hpp"

namespace gbc {

namespace {

constexpr std::uint64_t kMessageSalt = 0x6d65737361676531ULL;
constexpr std::uint64_t kNoiseSalt = 0x6e6f697365626c6bULL;

}  // namespace

WilsonInterval wilson_interval(long errors, long trials, double z) {
    WilsonInterval ci;
    if (trials <= 0) return ci;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double margin = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    ci.low = std::max(0.0, (center - margin) / denom);
    ci.high = std::min(1.0, (center + margin) / denom);
    return ci;
}

TrialReport estimate_error(const TrialRunner& runner, long trials, std::uint64_t seed_base) {
    if (trials < 100) {
        throw ValidationError("estimate_error needs at least 100 trials");
    }
    TrialReport report;
    report.trials = trials;
    report.seed_base = seed_base;
    double power_sum = 0.0;
    double power_sumsq = 0.0;
    double fb_sum = 0.0;
    for (long t = 0; t < trials; ++t) {
        const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(t);
        TrialOutcome outcome;
        try {
            outcome = runner(seed);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "trial runner failed at seed " << seed << ": " << e.what();
            throw SolverError(msg.str());
        }
        report.errors += outcome.error ? 1 : 0;
        report.e1 += outcome.e1 ? 1 : 0;
        report.e2 += outcome.e2 ? 1 : 0;
        report.e3 += outcome.e3 ? 1 : 0;
        report.fb_all_pass = report.fb_all_pass && outcome.fb_pass;
        power_sum += outcome.power;
        power_sumsq += outcome.power * outcome.power;
        fb_sum += outcome.fb_nats;
    }
    const double n = static_cast<double>(trials);
    report.p_hat = static_cast<double>(report.errors) / n;
    const WilsonInterval ci = wilson_interval(report.errors, trials);
    report.ci_low = ci.low;
    report.ci_high = ci.high;
    report.mean_power = power_sum / n;
    const double var = std::max(0.0, (power_sumsq - power_sum * power_sum / n) / (n - 1.0));
    report.power_stderr = std::sqrt(var / n);
    report.mean_fb_nats = fb_sum / n;
    return report;
}

std::uint64_t derive_cell_seed(std::uint64_t seed_base, const std::string& canonical_config) {
    return splitmix64(fnv1a64(canonical_config) ^ seed_base);
}

std::string canonical_config_string(const IntermittentConfig& cfg) {
    return intermittent_config_to_json(cfg).dump();
}

TrialRunner make_protocol_runner(std::shared_ptr<const ProtocolEngine> engine) {
    return [engine](std::uint64_t seed) {
        const IntermittentConfig& cfg = engine->config();
        std::mt19937_64 msg_rng(splitmix64(seed ^ kMessageSalt));
        const long message =
            1 + static_cast<long>(uniform_below(msg_rng, static_cast<std::uint64_t>(cfg.message_count)));
        const ProtocolTrace trace = engine->run(message, splitmix64(seed ^ kNoiseSalt));
        TrialOutcome out;
        out.error = false;
        for (long g : trace.final_guesses) out.error |= (g != message);
        out.power = trace.total_energy / static_cast<double>(cfg.blocklength);
        const FeedbackBudget fb = feedback_budget(trace, cfg);
        out.fb_nats = fb.used_nats;
        out.fb_pass = fb.pass;
        if (cfg.phases >= 2) {
            const EventTags tags = classify_error_events(trace, message).back();
            out.e1 = tags.e1;
            out.e2 = tags.e2;
            out.e3 = tags.e3;
        }
        return out;
    };
}

std::vector<std::pair<std::string, TrialReport>> sweep(const std::vector<IntermittentConfig>& grid,
                                                       long trials, std::uint64_t seed_base,
                                                       const std::vector<double>& noise_variances) {
    if (grid.empty()) {
        throw ValidationError("sweep grid must not be empty");
    }
    std::vector<std::pair<std::string, TrialReport>> table;
    table.reserve(grid.size());
    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        try {
            const std::string key = canonical_config_string(grid[cell]);
            const ChannelModel ch = make_channel(grid[cell].power_budget, noise_variances);
            auto engine = std::make_shared<const ProtocolEngine>(grid[cell], ch);
            const TrialReport report =
                estimate_error(make_protocol_runner(engine), trials, derive_cell_seed(seed_base, key));
            table.emplace_back(key, report);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "sweep cell " << cell << " failed: " << e.what();
            throw SolverError(msg.str());
        }
    }
    return table;
}

}  // namespace gbc
