#pragma once

#include <json.hpp>

#include "aniso/calderon.hpp"
#include "aniso/cover.hpp"
#include "aniso/kernels.hpp"
#include "aniso/maximal.hpp"
#include "aniso/verify.hpp"

namespace aniso {

using json = nlohmann::json;

json cover_params_to_json(const CoverParams& p);
CoverParams cover_params_from_json(const json& j);

// {"dimension", "family", "params": {...}, "declared_constants": {...}?, "t_valid": [lo,hi]?}
AnisotropicCover cover_from_json(const json& j);
AnisotropicCover cover_from_file(const std::string& path);

// {"family": "gaussian"|"hermite_gaussian"|"bump", "coefficients": [...], "dimension"?}
TestFunction kernel_from_json(const json& j, int default_dim);
TestFunction kernel_from_file(const std::string& path, int default_dim);

json config_to_json(const MaximalConfig& cfg);
MaximalConfig config_from_json(const json& j);

json report_to_json(const VerificationReport& rep);
json validation_to_json(const CoverValidationReport& rep);
json field_sidecar_json(const MaximalField& field, const MaximalConfig& cfg);
json decay_table_to_json(const DecayTable& table);

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace aniso
