#pragma once

#include <string>
#include <vector>

#include "blockpki/common.hpp"
#include "blockpki/crypto/multisig.hpp"
#include "blockpki/json_util.hpp"

namespace blockpki::certs {

// Certificate parameters chosen by the requester. Timestamps are simulated seconds.
struct CertData {
  std::string subject_name;
  crypto::GroupElement public_key;
  std::int64_t not_before = 0;
  std::int64_t not_after = 0;

  // Throws InvalidParams on an empty subject or an empty validity window.
  void validate() const;
  // Raw size as stored by a contract: name, key encoding and two 8-byte timestamps.
  std::size_t stored_size() const;

  friend bool operator==(const CertData&, const CertData&) = default;
};

Json to_json(const CertData& d);
CertData cert_data_from_json(const Json& j);

struct CertificatePayload {
  CertData data;
  std::vector<std::string> issuers;
  crypto::MultiSignature signature;

  friend bool operator==(const CertificatePayload&, const CertificatePayload&) = default;
};

// The signed message m: canonical JSON of the payload without schnorrSignature.
std::string canonical_encode(const CertData& data, const std::vector<std::string>& issuers);
inline std::string canonical_encode(const CertificatePayload& p) { return canonical_encode(p.data, p.issuers); }

// Certificate object with alphabetically sorted keys; schnorrSignature is hex(e ∥ s̄).
Json to_json(const crypto::Group& group, const CertificatePayload& p);
// signature.signer_ids is set to the issuer list. Throws ParseError.
CertificatePayload payload_from_json(const crypto::Group& group, const Json& j);

// Bytes a storage contract keeps for one record.
std::size_t stored_size(const crypto::Group& group, const CertificatePayload& p);

}  // namespace blockpki::certs
