#include "toml_json.hpp"

#include <sstream>
#include <stdexcept>

#include <toml++/toml.hpp>

#include "gqic/error.hpp"

namespace gqic::cli {

namespace {

nlohmann::json node_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = node_to_json(v);
    return j;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : *a) j.push_back(node_to_json(v));
    return j;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw DataError("unsupported TOML value type (dates and times are not used)");
}

void insert(toml::table& t, const std::string& key, const nlohmann::json& v);

toml::array to_array(const nlohmann::json& j) {
  toml::array a;
  for (const auto& v : j) {
    if (v.is_object()) {
      toml::table sub;
      for (const auto& [k, x] : v.items()) insert(sub, k, x);
      a.push_back(std::move(sub));
    } else if (v.is_array()) {
      a.push_back(to_array(v));
    } else if (v.is_boolean()) {
      a.push_back(v.get<bool>());
    } else if (v.is_number_integer()) {
      a.push_back(v.get<std::int64_t>());
    } else if (v.is_number()) {
      a.push_back(v.get<double>());
    } else if (v.is_string()) {
      a.push_back(v.get<std::string>());
    }
  }
  return a;
}

void insert(toml::table& t, const std::string& key, const nlohmann::json& v) {
  if (v.is_null()) return;
  if (v.is_object()) {
    toml::table sub;
    for (const auto& [k, x] : v.items()) insert(sub, k, x);
    t.insert_or_assign(key, std::move(sub));
  } else if (v.is_array()) {
    t.insert_or_assign(key, to_array(v));
  } else if (v.is_boolean()) {
    t.insert_or_assign(key, v.get<bool>());
  } else if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX))
      throw std::invalid_argument("value of '" + key + "' does not fit a TOML integer");
    t.insert_or_assign(key, static_cast<std::int64_t>(u));
  } else if (v.is_number_integer()) {
    t.insert_or_assign(key, v.get<std::int64_t>());
  } else if (v.is_number()) {
    t.insert_or_assign(key, v.get<double>());
  } else if (v.is_string()) {
    t.insert_or_assign(key, v.get<std::string>());
  }
}

}  // namespace

nlohmann::json toml_to_json(std::string_view text, const std::string& source_name) {
  try {
    const toml::table t = toml::parse(text, source_name);
    return node_to_json(t);
  } catch (const toml::parse_error& e) {
    const auto& b = e.source().begin;
    throw DataError(std::string(source_name) + ": " + std::string(e.description()),
                    static_cast<std::size_t>(b.line), static_cast<std::size_t>(b.column));
  }
}

std::string json_to_toml(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("json_to_toml: top level must be an object");
  toml::table t;
  for (const auto& [k, v] : j.items()) insert(t, k, v);
  std::ostringstream os;
  os << t;
  return os.str();
}

}  // namespace gqic::cli
