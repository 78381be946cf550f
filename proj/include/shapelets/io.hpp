#pragma once

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shapelets/discovery.hpp"
#include "shapelets/forest.hpp"
#include "shapelets/metrics.hpp"
#include "shapelets/types.hpp"

namespace shapelets {

/// Round-trip-exact decimal formatting (shortest form that parses back to
/// the same double). All file formats use it so byte-identity claims hold.
std::string format_double(double value);

/// FNV-1a 64-bit, hex encoded; used for input provenance in manifests.
std::string fnv1a_hex(std::string_view bytes);

/// Writes via a temp file in the same directory plus rename, so a failed
/// run never leaves a partial output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

// ---- dataset CSV: header "label,t0,..,t{m-1}", one series per row ----

std::string dataset_to_csv(const LabeledDataset& dataset);
LabeledDataset dataset_from_csv(std::string_view text, double sample_rate_hz = 1.0);
void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& dataset);
LabeledDataset read_dataset_csv(const std::filesystem::path& path, double sample_rate_hz = 1.0);

// ---- shapelet set JSON ----

std::string shapelets_to_json(const std::vector<Shapelet>& shapelets, const DiscoveryConfig& cfg);
std::pair<std::vector<Shapelet>, DiscoveryConfig> shapelets_from_json(std::string_view text);
void write_shapelets_json(const std::filesystem::path& path,
                          const std::vector<Shapelet>& shapelets, const DiscoveryConfig& cfg);
std::pair<std::vector<Shapelet>, DiscoveryConfig> read_shapelets_json(
    const std::filesystem::path& path);

// ---- transform CSV: shapelet ids as header, final column "label" ----

std::string transform_to_csv(const TransformMatrix& matrix);
TransformMatrix transform_from_csv(std::string_view text);
void write_transform_csv(const std::filesystem::path& path, const TransformMatrix& matrix);
TransformMatrix read_transform_csv(const std::filesystem::path& path);

// ---- forest model JSON (schema-versioned) ----

std::string model_to_json(const ForestModel& model);
ForestModel model_from_json(std::string_view text);
void write_model_json(const std::filesystem::path& path, const ForestModel& model);
ForestModel read_model_json(const std::filesystem::path& path);

// ---- evaluation report ----

std::string report_to_json(const Report& report, const ConfusionMatrix& cm);
std::string report_to_text(const Report& report);
std::string confusion_to_csv(const ConfusionMatrix& cm);

// ---- run manifest ----

/// Written alongside every command's output. `config` holds every resolved
/// flag value; inputs carry content hashes. duration_seconds is the one
/// field exempt from byte-identity across reruns.
std::string manifest_to_json(const std::string& command, const nlohmann::json& config,
                             const std::vector<std::filesystem::path>& inputs,
                             const std::vector<std::filesystem::path>& outputs,
                             double duration_seconds);

void write_manifest(const std::filesystem::path& output_path, const std::string& command,
                    const nlohmann::json& config,
                    const std::vector<std::filesystem::path>& inputs,
                    const std::vector<std::filesystem::path>& outputs,
                    double duration_seconds);

}  // namespace shapelets
