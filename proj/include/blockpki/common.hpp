#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blockpki {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// 32-byte digest; used for tx hashes, Merkle nodes and header hashes.
using Hash256 = std::array<std::uint8_t, 32>;

std::string to_hex(ByteView data);
template <std::size_t N>
std::string to_hex(const std::array<std::uint8_t, N>& data) {
  return to_hex(ByteView(data.data(), data.size()));
}

// Throws ParseError on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);
Hash256 hash_from_hex(std::string_view hex);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline ByteView as_view(std::string_view s) {
  return ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

void append(Bytes& out, ByteView data);
void append_u64_be(Bytes& out, std::uint64_t value);

// 20-byte ledger identifier for accounts and contracts.
class Address {
 public:
  Address() = default;
  explicit Address(const std::array<std::uint8_t, 20>& raw) : raw_(raw) {}

  // Deterministic address for a named simulation participant.
  static Address from_label(std::string_view label);
  static Address from_hex(std::string_view hex);

  const std::array<std::uint8_t, 20>& raw() const { return raw_; }
  std::string hex() const { return to_hex(raw_); }
  bool is_zero() const;

  auto operator<=>(const Address&) const = default;

 private:
  std::array<std::uint8_t, 20> raw_{};
};

// Simulated time in integer milliseconds.
using SimTime = std::int64_t;

// Ledger currency units.
using Amount = std::int64_t;

}  // namespace blockpki
