#pragma once

#include <memory>

#include "blockpki/common.hpp"

namespace blockpki {

Hash256 sha256(ByteView data);
Hash256 sha256(std::string_view data);
std::array<std::uint8_t, 64> sha512(ByteView data);
Hash256 hmac_sha256(ByteView key, ByteView data);

// Streaming SHA-256 for inputs assembled from several pieces.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(ByteView data);
  Sha256& update(std::uint8_t byte) { return update(ByteView(&byte, 1)); }
  Hash256 finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace blockpki
