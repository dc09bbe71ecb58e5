#include "gbc/serialize.hpp"

#include <string>

#include "gbc/errors.hpp"

namespace gbc {

namespace {

const nlohmann::json& require(const nlohmann::json& doc, const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end()) {
        throw ValidationError(std::string("missing field \"") + key + "\"");
    }
    return *it;
}

}  // namespace

LinearFeedbackScheme scheme_from_json(const nlohmann::json& doc) {
    LinearFeedbackScheme s;
    try {
        s.n = require(doc, "n").get<int>();
        const int receivers = require(doc, "K").get<int>();
        if (s.n < 1 || receivers < 1) {
            throw ValidationError("scheme needs n >= 1 and K >= 1");
        }
        const auto& d = require(doc, "d");
        if (!d.is_array() || static_cast<int>(d.size()) != s.n) {
            throw ValidationError("\"d\" must be an array of n reals");
        }
        s.d.resize(s.n);
        for (int i = 0; i < s.n; ++i) s.d(i) = d[static_cast<std::size_t>(i)].get<double>();
        const auto& mats = require(doc, "A");
        if (!mats.is_array() || static_cast<int>(mats.size()) != receivers) {
            throw ValidationError("\"A\" must hold K matrices");
        }
        for (int k = 0; k < receivers; ++k) {
            const auto& rows = mats[static_cast<std::size_t>(k)];
            if (!rows.is_array() || static_cast<int>(rows.size()) != s.n) {
                throw ValidationError("matrix A_" + std::to_string(k + 1) + " must have n rows");
            }
            Eigen::MatrixXd a(s.n, s.n);
            for (int i = 0; i < s.n; ++i) {
                const auto& row = rows[static_cast<std::size_t>(i)];
                if (!row.is_array() || static_cast<int>(row.size()) != s.n) {
                    throw ValidationError("matrix A_" + std::to_string(k + 1) + " row " +
                                          std::to_string(i + 1) + " must have n entries");
                }
                for (int j = 0; j < s.n; ++j) {
                    a(i, j) = row[static_cast<std::size_t>(j)].get<double>();
                }
            }
            s.a_mats.push_back(std::move(a));
        }
        s.theta_variance = require(doc, "theta_variance").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed scheme document: ") + e.what());
    }
    if (s.theta_variance < 0.0) {
        throw ValidationError("theta_variance must be >= 0");
    }
    // Strict lower-triangularity is part of the wire contract.
    for (std::size_t k = 0; k < s.a_mats.size(); ++k) {
        for (int i = 0; i < s.n; ++i) {
            for (int j = i; j < s.n; ++j) {
                if (s.a_mats[k](i, j) != 0.0) {
                    throw ValidationError("scheme rejected: A_" + std::to_string(k + 1) +
                                          " entry (" + std::to_string(i + 1) + "," +
                                          std::to_string(j + 1) + ") must be 0");
                }
            }
        }
    }
    return s;
}

nlohmann::json scheme_to_json(const LinearFeedbackScheme& s) {
    nlohmann::json doc;
    doc["n"] = s.n;
    doc["K"] = s.receivers();
    doc["d"] = nlohmann::json::array();
    for (int i = 0; i < s.n; ++i) doc["d"].push_back(s.d(i));
    doc["A"] = nlohmann::json::array();
    for (const auto& a : s.a_mats) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < s.n; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < s.n; ++j) row.push_back(a(i, j));
            rows.push_back(std::move(row));
        }
        doc["A"].push_back(std::move(rows));
    }
    doc["theta_variance"] = s.theta_variance;
    return doc;
}

IntermittentConfig intermittent_config_from_json(const nlohmann::json& doc) {
    IntermittentConfig cfg;
    try {
        cfg.phases = require(doc, "L").get<int>();
        cfg.blocklength = require(doc, "n").get<int>();
        cfg.epsilon = doc.value("epsilon", 0.0);
        cfg.message_count = require(doc, "message_count").get<long>();
        cfg.power_budget = require(doc, "power_budget").get<double>();
        cfg.fb_rate = require(doc, "fb_rate").get<double>();
        cfg.gamma = require(doc, "gamma").get<std::vector<double>>();
        cfg.codebook_seeds = require(doc, "codebook_seeds").get<std::vector<std::uint64_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed protocol config: ") + e.what());
    }
    validate_config(cfg);
    return cfg;
}

nlohmann::json intermittent_config_to_json(const IntermittentConfig& cfg) {
    nlohmann::json doc;
    doc["L"] = cfg.phases;
    doc["n"] = cfg.blocklength;
    doc["epsilon"] = cfg.epsilon;
    doc["message_count"] = cfg.message_count;
    doc["power_budget"] = cfg.power_budget;
    doc["fb_rate"] = cfg.fb_rate;
    doc["gamma"] = cfg.gamma;
    doc["codebook_seeds"] = cfg.codebook_seeds;
    return doc;
}

nlohmann::json trace_to_json(const ProtocolTrace& trace) {
    nlohmann::json doc;
    doc["message"] = trace.message;
    doc["final_guesses"] = trace.final_guesses;
    doc["total_energy"] = trace.total_energy;
    doc["fb_nats_per_receiver"] = trace.fb_nats_per_receiver;
    doc["phases"] = nlohmann::json::array();
    for (const auto& rec : trace.phases) {
        nlohmann::json phase;
        phase["phase"] = rec.phase;
        phase["error_signal_sent"] = rec.error_signal_sent;
        phase["guesses"] = rec.guesses;
        phase["energy"] = rec.energy;
        nlohmann::json fired = nlohmann::json::array();
        for (char f : rec.threshold_fired) fired.push_back(f != 0);
        phase["threshold_fired"] = std::move(fired);
        nlohmann::json inputs = nlohmann::json::array();
        for (int i = 0; i < rec.inputs.size(); ++i) inputs.push_back(rec.inputs(i));
        phase["inputs"] = std::move(inputs);
        nlohmann::json outputs = nlohmann::json::array();
        for (int k = 0; k < rec.outputs.rows(); ++k) {
            nlohmann::json row = nlohmann::json::array();
            for (int i = 0; i < rec.outputs.cols(); ++i) row.push_back(rec.outputs(k, i));
            outputs.push_back(std::move(row));
        }
        phase["outputs"] = std::move(outputs);
        doc["phases"].push_back(std::move(phase));
    }
    return doc;
}

}  // namespace gbc
