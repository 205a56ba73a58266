#include "blockpki/json_util.hpp"

#include "blockpki/error.hpp"

namespace blockpki {

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::ParseError, what + ": " + ex.what());
  }
}

}  // namespace blockpki
