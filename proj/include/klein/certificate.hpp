#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "klein/tower.hpp"

namespace klein {

using Json = nlohmann::json;

// Constructive tower description: list of levels with generator names and
// modulus coefficients rendered in the prefix tower's element syntax.
Json tower_to_json(const TowerPtr& t);
TowerPtr tower_from_json(const Json& j);

// Sealed envelope: {"kind", "version", "body", "sha256"} where the digest
// covers the canonical dump of the body.  open_certificate verifies the
// digest and the kind and returns the body; a mismatch throws.
Json seal_certificate(const std::string& kind, Json body);
Json open_certificate(const Json& sealed, const std::string& expected_kind);

void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

}  // namespace klein
