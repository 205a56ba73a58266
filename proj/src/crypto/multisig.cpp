#include "blockpki/crypto/multisig.hpp"

#include <set>

#include "blockpki/crypto/rfc6979.hpp"
#include "blockpki/error.hpp"
#include "blockpki/hash.hpp"

namespace blockpki::crypto {
namespace {

constexpr std::string_view kKeygenTag = "blockpki/keygen/v1";
constexpr std::string_view kPopTag = "blockpki/pop/v1";

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) {
    throw Error(ErrorCode::EmptyAggregation, std::string(what) + " list is empty");
  }
}

bool in_range(const Group& group, const Scalar& x) {
  return x.value >= 1 && x.value < group.order();
}

}  // namespace

Scalar sha256_challenge(const Group& group, const GroupElement& n_bar, ByteView message) {
  Sha256 h;
  h.update(n_bar.encoding);
  h.update(message);
  const Hash256 digest = h.finish();
  return group.reduce(bigint_from_bytes(digest));
}

GroupParams GroupParams::with_sha256(std::shared_ptr<const Group> group) {
  return GroupParams{std::move(group), "sha256", &sha256_challenge};
}

GroupParams GroupParams::with_hash(std::shared_ptr<const Group> group, std::string tag,
                                   ChallengeHash hash) {
  return GroupParams{std::move(group), std::move(tag), std::move(hash)};
}

KeyPair keygen(const GroupParams& params, ByteView seed) {
  if (seed.empty()) {
    throw Error(ErrorCode::InvalidParams, "keygen seed must be non-empty");
  }
  Bytes input = to_bytes(kKeygenTag);
  append(input, seed);
  const auto wide = sha512(input);
  const BigInt q_minus_1 = params.g().order() - 1;
  const Scalar x(bigint_from_bytes(wide) % q_minus_1 + 1);
  return keypair_from_secret(params, x);
}

KeyPair keypair_from_secret(const GroupParams& params, const Scalar& x) {
  if (!in_range(params.g(), x)) {
    throw Error(ErrorCode::InvalidScalar, "secret key must lie in [1, q-1]");
  }
  return KeyPair{x, params.g().pow_gen(x)};
}

Scalar NoncePair::take_secret() {
  if (!secret_) {
    throw Error(ErrorCode::NonceReuse, "nonce already consumed; reuse would leak the signing key");
  }
  Scalar k = std::move(*secret_);
  secret_.reset();
  return k;
}

NoncePair gen_nonce(const GroupParams& params, const KeyPair& key, ByteView message) {
  const BigInt k = rfc6979_nonce(params.g().order(), key.secret.value, sha256(message));
  return nonce_from_secret(params, Scalar(k));
}

NoncePair nonce_from_secret(const GroupParams& params, const Scalar& k) {
  if (!in_range(params.g(), k)) {
    throw Error(ErrorCode::InvalidScalar, "nonce must lie in [1, q-1]");
  }
  return NoncePair(k, params.g().pow_gen(k));
}

GroupElement combine_nonces(const GroupParams& params, std::span<const GroupElement> nonces) {
  require_nonempty(nonces.size(), "nonce");
  return params.g().product(nonces);
}

Scalar challenge(const GroupParams& params, const GroupElement& n_bar, ByteView message) {
  return params.g().reduce(params.hash(params.g(), n_bar, message).value);
}

PartialSignature partial_sign(const GroupParams& params, const SignerId& signer,
                              const KeyPair& key, NoncePair& nonce, const Scalar& e) {
  const Group& g = params.g();
  Scalar k = nonce.take_secret();
  PartialSignature out{signer, g.sub(k, g.mul(e, key.secret))};
  k.value = 0;
  return out;
}

MultiSignature combine_partials(const GroupParams& params,
                                std::span<const PartialSignature> partials, const Scalar& e) {
  require_nonempty(partials.size(), "partial signature");
  const Group& g = params.g();
  std::set<SignerId> seen;
  MultiSignature out{g.reduce(e.value), Scalar(0), {}};
  out.signer_ids.reserve(partials.size());
  for (const auto& p : partials) {
    if (!seen.insert(p.signer_id).second) {
      throw Error(ErrorCode::DuplicateSigner, "signer '" + p.signer_id + "' appears twice");
    }
    out.s_bar = g.add(out.s_bar, p.s);
    out.signer_ids.push_back(p.signer_id);
  }
  return out;
}

GroupElement combine_keys(const GroupParams& params, std::span<const GroupElement> keys) {
  require_nonempty(keys.size(), "public key");
  return params.g().product(keys);
}

bool verify_multisig(const GroupParams& params, const MultiSignature& sig,
                     const GroupElement& q_bar, ByteView message) {
  const Group& g = params.g();
  if (sig.e.value >= g.order() || sig.s_bar.value >= g.order() || !g.is_valid(q_bar)) {
    return false;
  }
  const GroupElement n_prime = g.double_pow(sig.s_bar, q_bar, sig.e);
  return challenge(params, n_prime, message) == sig.e;
}

bool verify_partial(const GroupParams& params, const Scalar& s, const Scalar& e,
                    const GroupElement& public_nonce, const GroupElement& public_key) {
  const Group& g = params.g();
  if (!g.is_valid(public_key) || !g.is_valid(public_nonce)) {
    return false;
  }
  return g.double_pow(s, public_key, e) == public_nonce;
}

SchnorrSignature schnorr_sign(const GroupParams& params, const KeyPair& key, ByteView message) {
  NoncePair nonce = gen_nonce(params, key, message);
  const Scalar e = challenge(params, nonce.public_nonce(), message);
  const PartialSignature p = partial_sign(params, "", key, nonce, e);
  return SchnorrSignature{e, p.s};
}

bool schnorr_verify(const GroupParams& params, const SchnorrSignature& sig,
                    const GroupElement& public_key, ByteView message) {
  return verify_multisig(params, MultiSignature{sig.e, sig.s, {}}, public_key, message);
}

Bytes pop_message(const Group& group, const GroupElement& public_key) {
  Bytes m = to_bytes(kPopTag);
  append(m, as_view(group.name()));
  m.push_back(0x00);
  append(m, public_key.encoding);
  return m;
}

ProofOfPossession create_pop(const GroupParams& params, const SignerId& owner, const KeyPair& key) {
  return ProofOfPossession{owner, schnorr_sign(params, key, pop_message(params.g(), key.public_key))};
}

bool verify_pop(const GroupParams& params, const ProofOfPossession& pop, const GroupElement& public_key) {
  return schnorr_verify(params, pop.pop_sig, public_key, pop_message(params.g(), public_key));
}

}  // namespace blockpki::crypto
