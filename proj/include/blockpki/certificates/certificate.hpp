#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "blockpki/certificates/payload.hpp"
#include "blockpki/contracts/runtime.hpp"
#include "blockpki/ledger/chain.hpp"
#include "blockpki/merkle.hpp"

namespace blockpki::certs {

struct BlockPkiCertificate {
  CertificatePayload payload;
  ledger::Transaction transaction;
  std::uint64_t block_no = 0;
  merkle::InclusionProof inclusion_proof;

  friend bool operator==(const BlockPkiCertificate&, const BlockPkiCertificate&) = default;
};

// {"certificateData": {...}, "domainCertificate": {"blockNo", "inclusionProof", "transaction"}}
Json to_json(const crypto::Group& group, const BlockPkiCertificate& cert);
BlockPkiCertificate certificate_from_json(const crypto::Group& group, const Json& j);
// Pretty-printed with sorted keys; load then store reproduces the bytes.
std::string store_certificate_file(const crypto::Group& group, const BlockPkiCertificate& cert);
BlockPkiCertificate load_certificate_file(const crypto::Group& group, const std::string& text);

// ---- CA identities ----

struct CaIdentity {
  std::string id;
  Address address;
  crypto::GroupElement public_key;
};

class CaDirectory {
 public:
  void add(CaIdentity ca);
  const CaIdentity& by_address(const Address& a) const;  // throws InvalidParams
  const CaIdentity& by_id(const std::string& id) const;  // throws InvalidParams
  bool contains(const Address& a) const { return by_address_.count(a) > 0; }
  const std::vector<CaIdentity>& all() const { return cas_; }

 private:
  std::vector<CaIdentity> cas_;
  std::map<Address, std::size_t> by_address_;
  std::map<std::string, std::size_t> by_id_;
};

// ---- signing round ----

// Everything a signer needs once all nonces are on chain. Signers are listed
// in authorized order, or in nonce order when the contract runs in first-T mode.
struct SigningContext {
  std::vector<Address> signers;
  std::vector<std::string> issuers;
  std::vector<crypto::GroupElement> nonces;
  std::string message;
  crypto::GroupElement n_bar;
  crypto::Scalar e;
};

// Throws InvalidParams before all nonces are gathered.
SigningContext signing_context(const crypto::GroupParams& params, const contracts::DomainContractState& st,
                               const CaDirectory& directory);

// Input to the deterministic nonce of a CA: certificate data bound to the
// contract and round, known before the signer set is fixed.
Bytes nonce_derivation_message(const contracts::DomainContractState& st);

// Combines the on-chain partials and verifies the result. Throws
// AssemblyFailed naming every CA whose partial fails g^s·Q^e = N.
CertificatePayload combine_from_contract(const crypto::GroupParams& params, const contracts::DomainContractState& st,
                                         const CaDirectory& directory);

// Certificate for a mined storage transaction. Throws Unmined / UnknownTx.
BlockPkiCertificate finalize_certificate(const ledger::Chain& chain, const CertificatePayload& payload,
                                         const Hash256& storage_tx);

// ---- client verification ----

enum class ClientMode { Unaware, Light, Full };
std::string to_string(ClientMode m);
ClientMode client_mode_from_string(const std::string& s);  // throws ParseError

enum class RejectReason {
  WrongDomain,
  Expired,
  NotYetValid,
  UntrustedIssuer,
  BelowThreshold,
  BadSignature,
  BadInclusion,
  UnknownBlock,
};
std::string to_string(RejectReason r);

struct TrustedCa {
  std::string id;
  crypto::GroupElement public_key;
  crypto::ProofOfPossession pop;
};

class ClientTrustStore {
 public:
  // Throws InvalidParams naming the CA whose proof of possession fails, unless
  // the check is disabled.
  ClientTrustStore(const crypto::GroupParams& params, std::vector<TrustedCa> cas, ClientMode mode,
                   std::size_t threshold_policy, bool check_pops = true);

  ClientMode mode() const { return mode_; }
  void set_mode(ClientMode m) { mode_ = m; }
  std::size_t threshold_policy() const { return threshold_policy_; }
  const std::map<std::string, TrustedCa>& cas() const { return cas_; }
  const TrustedCa* find(const std::string& id) const;

  // Throws ChainIntegrity when the headers do not link.
  void sync_headers(std::vector<ledger::BlockHeader> headers);
  // Full nodes keep the blocks; the headers are taken from them.
  void sync_chain(std::shared_ptr<const ledger::BlockStore> chain);
  const std::vector<ledger::BlockHeader>& headers() const { return headers_; }
  const ledger::BlockStore* full_chain() const { return full_chain_.get(); }

 private:
  std::map<std::string, TrustedCa> cas_;
  ClientMode mode_;
  std::size_t threshold_policy_;
  std::vector<ledger::BlockHeader> headers_;
  std::shared_ptr<const ledger::BlockStore> full_chain_;
};

Json to_json(const crypto::Group& group, const TrustedCa& ca);
// {"threshold": T, "cas": [{"id", "publicKey", "pop"}]}; mode comes from the caller.
Json truststore_json(const crypto::Group& group, const std::vector<TrustedCa>& cas, std::size_t threshold);
std::vector<TrustedCa> trusted_cas_from_json(const crypto::Group& group, const Json& j);

struct VerifyResult {
  bool accepted = false;
  std::optional<RejectReason> reason;
  std::string warning;
};

// `now` is in simulated seconds.
VerifyResult verify_certificate(const crypto::GroupParams& params, const BlockPkiCertificate& cert,
                                const ClientTrustStore& trust, const std::string& visited_domain, std::int64_t now);

}  // namespace blockpki::certs
