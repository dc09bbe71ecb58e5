#pragma once

#include <json.hpp>

#include "gbc/intermittent.hpp"
#include "gbc/linfb.hpp"

namespace gbc {

/// Scheme document: {"n": int, "K": int, "d": [..n..],
/// "A": [K matrices, each n rows of n entries], "theta_variance": real}.
/// Rejected unless every matrix is strictly lower triangular.
LinearFeedbackScheme scheme_from_json(const nlohmann::json& doc);
nlohmann::json scheme_to_json(const LinearFeedbackScheme& s);

/// Config document mirroring IntermittentConfig:
/// {"L", "n", "epsilon", "message_count", "power_budget", "fb_rate",
///  "gamma": [..L..], "codebook_seeds": [..L..]}.
IntermittentConfig intermittent_config_from_json(const nlohmann::json& doc);
nlohmann::json intermittent_config_to_json(const IntermittentConfig& cfg);

/// Full trace export for fixture tests.
nlohmann::json trace_to_json(const ProtocolTrace& trace);

}  // namespace gbc
