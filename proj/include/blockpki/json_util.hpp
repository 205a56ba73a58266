#pragma once

#include <string>

#include "json.hpp"

namespace blockpki {

using Json = nlohmann::json;

// Compact, key-sorted, ASCII-only rendering. Every hashed or persisted JSON
// document goes through this.
inline std::string canonical_dump(const Json& j) { return j.dump(-1, ' ', true); }

// Wraps nlohmann parse/type errors into ParseError.
Json parse_json(const std::string& text, const std::string& what);

}  // namespace blockpki
