#pragma once

#include <optional>
#include <string>

#include "qchain/model.hpp"
#include "qchain/vlmap.hpp"

namespace qchain {

/// Fully parsed configuration document.
struct ExperimentConfig {
    ExperimentSpec experiment;
    std::optional<VLConfig> vl;
};

/// Strict parse of the JSON configuration text; throws ValidationError with a
/// precise location on any schema or invariant violation.
ExperimentConfig parse_config(const std::string& json_text);

/// Convenience wrapper returning just the experiment part.
ExperimentSpec parse_experiment(const std::string& json_text);

/// Canonical JSON serialization; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);
std::string serialize_experiment(const ExperimentSpec& spec);

/// FNV-1a digest of the canonical serialization; stable under reserialization.
std::string config_digest(const ExperimentConfig& config);

/// Text of a shipped named configuration ("paper_fig3", "paper_fig3_xy"),
/// or empty if the name is unknown.
std::string embedded_config(const std::string& name);

/// Reads a config by path, falling back to the embedded presets by name.
ExperimentConfig load_config(const std::string& path_or_name);

} // namespace qchain
