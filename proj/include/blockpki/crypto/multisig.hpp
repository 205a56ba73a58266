#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blockpki/crypto/group.hpp"

namespace blockpki::crypto {

using SignerId = std::string;

// Maps (N̄, m) to the challenge scalar. The default hashes the fixed-width
// encoding of N̄ followed by m with SHA-256 and reduces modulo q. Tests inject
// small hand-computed functions here.
using ChallengeHash =
    std::function<Scalar(const Group& group, const GroupElement& n_bar, ByteView message)>;

struct GroupParams {
  std::shared_ptr<const Group> group;
  std::string hash_tag;
  ChallengeHash hash;

  static GroupParams with_sha256(std::shared_ptr<const Group> group);
  static GroupParams with_hash(std::shared_ptr<const Group> group, std::string tag, ChallengeHash hash);

  const Group& g() const { return *group; }
};

Scalar sha256_challenge(const Group& group, const GroupElement& n_bar, ByteView message);

struct KeyPair {
  Scalar secret;
  GroupElement public_key;
};

// Deterministic for a fixed seed; throws InvalidParams on an empty seed.
KeyPair keygen(const GroupParams& params, ByteView seed);
// Throws InvalidScalar unless x lies in [1, q-1].
KeyPair keypair_from_secret(const GroupParams& params, const Scalar& x);

// Single-use nonce. The secret half is released exactly once by take_secret().
class NoncePair {
 public:
  NoncePair(Scalar secret, GroupElement public_nonce)
      : secret_(std::move(secret)), public_nonce_(std::move(public_nonce)) {}

  NoncePair(const NoncePair&) = delete;
  NoncePair& operator=(const NoncePair&) = delete;
  NoncePair(NoncePair&&) noexcept = default;
  NoncePair& operator=(NoncePair&&) noexcept = default;

  const GroupElement& public_nonce() const { return public_nonce_; }
  bool consumed() const { return !secret_.has_value(); }

  // Throws NonceReuse on the second call.
  Scalar take_secret();

 private:
  std::optional<Scalar> secret_;
  GroupElement public_nonce_;
};

// RFC 6979 nonce bound to (secret key, message).
NoncePair gen_nonce(const GroupParams& params, const KeyPair& key, ByteView message);
NoncePair nonce_from_secret(const GroupParams& params, const Scalar& k);

struct PartialSignature {
  SignerId signer_id;
  Scalar s;
  friend bool operator==(const PartialSignature&, const PartialSignature&) = default;
};

struct MultiSignature {
  Scalar e;
  Scalar s_bar;
  std::vector<SignerId> signer_ids;
  friend bool operator==(const MultiSignature&, const MultiSignature&) = default;
};

GroupElement combine_nonces(const GroupParams& params, std::span<const GroupElement> nonces);
Scalar challenge(const GroupParams& params, const GroupElement& n_bar, ByteView message);

// s = k - e*x mod q. Consumes the nonce.
PartialSignature partial_sign(const GroupParams& params, const SignerId& signer,
                              const KeyPair& key, NoncePair& nonce, const Scalar& e);

// Sums the partial signatures; signer ids are kept in submission order.
MultiSignature combine_partials(const GroupParams& params,
                                std::span<const PartialSignature> partials, const Scalar& e);

GroupElement combine_keys(const GroupParams& params, std::span<const GroupElement> keys);

// Recomputes N̄' = g^s̄ · Q̄^e and accepts iff h(N̄' ∥ m) = e.
bool verify_multisig(const GroupParams& params, const MultiSignature& sig,
                     const GroupElement& q_bar, ByteView message);

// Per-signer check g^s · Q^e = N, used to locate a bad contribution.
bool verify_partial(const GroupParams& params, const Scalar& s, const Scalar& e,
                    const GroupElement& public_nonce, const GroupElement& public_key);

struct SchnorrSignature {
  Scalar e;
  Scalar s;
  friend bool operator==(const SchnorrSignature&, const SchnorrSignature&) = default;
};

SchnorrSignature schnorr_sign(const GroupParams& params, const KeyPair& key, ByteView message);
bool schnorr_verify(const GroupParams& params, const SchnorrSignature& sig,
                    const GroupElement& public_key, ByteView message);

struct ProofOfPossession {
  SignerId owner_id;
  SchnorrSignature pop_sig;
};

// Self-signature over the owner's public key.
ProofOfPossession create_pop(const GroupParams& params, const SignerId& owner, const KeyPair& key);
bool verify_pop(const GroupParams& params, const ProofOfPossession& pop, const GroupElement& public_key);
Bytes pop_message(const Group& group, const GroupElement& public_key);

}  // namespace blockpki::crypto
