#pragma once

#include "blockpki/common.hpp"
#include "blockpki/crypto/group.hpp"

namespace blockpki::crypto {

// Deterministic nonce per RFC 6979 section 3.2 with HMAC-SHA256, for an arbitrary
// prime order q. `message_digest` is h1 = SHA-256(m). Returns k in [1, q-1].
BigInt rfc6979_nonce(const BigInt& q, const BigInt& secret, const Hash256& message_digest);

}  // namespace blockpki::crypto
