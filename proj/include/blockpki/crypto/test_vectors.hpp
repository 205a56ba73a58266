#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "blockpki/crypto/group.hpp"

namespace blockpki::crypto {

// One record of the partial-signature vector file:
// {group, x, k, e, message_hex, expected_s, expected_N}. Scalars are hex
// integers, expected_N is the hex wire encoding of g^k.
struct SigningVector {
  std::string group;
  BigInt x;
  BigInt k;
  BigInt e;
  Bytes message;
  BigInt expected_s;
  Bytes expected_n;
};

std::vector<SigningVector> parse_signing_vectors(std::string_view json_text);
std::vector<SigningVector> load_signing_vectors(const std::filesystem::path& path);

struct VectorOutcome {
  bool s_matches = false;
  bool n_matches = false;
  bool equation_holds = false;  // g^s · Q^e = N

  bool ok() const { return s_matches && n_matches && equation_holds; }
};

VectorOutcome check_signing_vector(const SigningVector& v);

}  // namespace blockpki::crypto
