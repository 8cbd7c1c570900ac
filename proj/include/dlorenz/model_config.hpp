#pragma once

#include <string>

#include <json.hpp>

#include "dlorenz/model_family.hpp"

namespace dlorenz {

inline constexpr const char* kModelSchema = "dlorenz.model/1";

/// Missing fields fall back to the default model of the declared case.
/// Throws ErrorKind::Config on malformed input and, unless `validate` is
/// false, checks the result with validate_model.
Model model_from_json(const nlohmann::json& j, bool validate = true);
nlohmann::json model_to_json(const Model& m);

Model load_model(const std::string& path, bool validate = true);

TangencyCase parse_case(const std::string& s);

}  // namespace dlorenz
