#include "blockpki/crypto/rfc6979.hpp"

#include <boost/multiprecision/integer.hpp>

#include "blockpki/error.hpp"
#include "blockpki/hash.hpp"

namespace blockpki::crypto {
namespace {

std::size_t bit_length(const BigInt& v) {
  return v.is_zero() ? 0 : boost::multiprecision::msb(v) + 1;
}

BigInt bits2int(ByteView bits, std::size_t qlen) {
  BigInt x = bigint_from_bytes(bits);
  const std::size_t blen = bits.size() * 8;
  if (blen > qlen) {
    x >>= (blen - qlen);
  }
  return x;
}

}  // namespace

BigInt rfc6979_nonce(const BigInt& q, const BigInt& secret, const Hash256& message_digest) {
  if (q < 2 || secret <= 0 || secret >= q) {
    throw Error(ErrorCode::InvalidParams, "rfc6979: secret must lie in [1, q-1]");
  }
  const std::size_t qlen = bit_length(q);
  const std::size_t rlen = (qlen + 7) / 8;

  const Bytes x_octets = bigint_to_bytes(secret, rlen);
  BigInt z = bits2int(message_digest, qlen);
  if (z >= q) z -= q;
  const Bytes h_octets = bigint_to_bytes(z, rlen);

  Bytes v(32, 0x01);
  Bytes k(32, 0x00);

  auto hmac = [&k](ByteView data) {
    const Hash256 mac = hmac_sha256(k, data);
    return Bytes(mac.begin(), mac.end());
  };
  auto seed_step = [&](std::uint8_t sep) {
    Bytes buf = v;
    buf.push_back(sep);
    append(buf, x_octets);
    append(buf, h_octets);
    k = hmac(buf);
    v = hmac(v);
  };
  seed_step(0x00);
  seed_step(0x01);

  while (true) {
    Bytes t;
    while (t.size() * 8 < qlen) {
      v = hmac(v);
      append(t, v);
    }
    BigInt candidate = bits2int(t, qlen);
    if (candidate >= 1 && candidate < q) {
      return candidate;
    }
    Bytes buf = v;
    buf.push_back(0x00);
    k = hmac(buf);
    v = hmac(v);
  }
}

}  // namespace blockpki::crypto
