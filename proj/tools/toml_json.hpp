#ifndef GQIC_TOOLS_TOML_JSON_HPP_
#define GQIC_TOOLS_TOML_JSON_HPP_

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace gqic::cli {

// TOML document -> JSON value. Parse errors become gqic::DataError with the
// source position.
nlohmann::json toml_to_json(std::string_view text, const std::string& source_name);

// JSON object -> TOML document text. Nulls are dropped.
std::string json_to_toml(const nlohmann::json& j);

}  // namespace gqic::cli

#endif  // GQIC_TOOLS_TOML_JSON_HPP_
