#pragma once

/**
 * JSON readers/writers for the on-disk formats (field names are pinned by
 * the schema files under schemas/), plus a CSV dump for sample sets.
 */

#include <filesystem>
#include <string>

#include <json.hpp>

#include "relinfo/discrete.hpp"
#include "relinfo/estimators.hpp"
#include "relinfo/pca.hpp"

namespace relinfo {

nlohmann::json to_json(const JointDistribution& joint);
JointDistribution joint_from_json(const nlohmann::json& doc);
JointDistribution load_joint(const std::filesystem::path& path);
void save_joint(const JointDistribution& joint, const std::filesystem::path& path);

nlohmann::json to_json(const LinearGaussianModel& model);
LinearGaussianModel model_from_json(const nlohmann::json& doc);
LinearGaussianModel load_model(const std::filesystem::path& path);
void save_model(const LinearGaussianModel& model, const std::filesystem::path& path);

SourceSpec source_from_json(const nlohmann::json& doc);

/// One point per row, plain decimal columns.
void write_samples_csv(const SampleSet& samples, const std::filesystem::path& path);

/// Fixed numeric formatting used by every report writer: shortest round-trip
/// style with 12 significant digits, locale independent.
std::string format_number(double value);

}  // namespace relinfo
