#include "blockpki/common.hpp"

#include <algorithm>

#include "blockpki/error.hpp"
#include "blockpki/hash.hpp"

namespace blockpki {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0F]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::ParseError, "hex string has odd length");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = hex_value(hex[i]);
    const int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::ParseError, "invalid hex character");
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

Hash256 hash_from_hex(std::string_view hex) {
  const Bytes raw = from_hex(hex);
  if (raw.size() != 32) {
    throw Error(ErrorCode::ParseError, "expected 32-byte hash, got " + std::to_string(raw.size()));
  }
  Hash256 out;
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

void append(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

void append_u64_be(Bytes& out, std::uint64_t value) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>((value >> shift) & 0xFF));
  }
}

Address Address::from_label(std::string_view label) {
  Sha256 h;
  h.update(as_view("blockpki/address/"));
  h.update(as_view(label));
  const Hash256 digest = h.finish();
  std::array<std::uint8_t, 20> raw{};
  std::copy_n(digest.begin(), raw.size(), raw.begin());
  return Address(raw);
}

Address Address::from_hex(std::string_view hex) {
  const Bytes raw = blockpki::from_hex(hex);
  if (raw.size() != 20) {
    throw Error(ErrorCode::ParseError, "address must be 20 bytes");
  }
  std::array<std::uint8_t, 20> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return Address(out);
}

bool Address::is_zero() const {
  return std::all_of(raw_.begin(), raw_.end(), [](std::uint8_t b) { return b == 0; });
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyAggregation: return "EmptyAggregation";
    case ErrorCode::DuplicateSigner: return "DuplicateSigner";
    case ErrorCode::NonceReuse: return "NonceReuse";
    case ErrorCode::InvalidScalar: return "InvalidScalar";
    case ErrorCode::InvalidElement: return "InvalidElement";
    case ErrorCode::EmptyBlock: return "EmptyBlock";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::InsufficientBalance: return "InsufficientBalance";
    case ErrorCode::UnknownSender: return "UnknownSender";
    case ErrorCode::UnknownTx: return "UnknownTx";
    case ErrorCode::Unmined: return "Unmined";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NoControl: return "NoControl";
    case ErrorCode::AssemblyFailed: return "AssemblyFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ChainIntegrity: return "ChainIntegrity";
  }
  return "Unknown";
}

}  // namespace blockpki
