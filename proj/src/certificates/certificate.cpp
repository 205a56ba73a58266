#include "blockpki/certificates/certificate.hpp"

#include <algorithm>
#include <set>

#include "blockpki/error.hpp"

namespace blockpki::certs {

// ---- file format ----

Json to_json(const crypto::Group& group, const BlockPkiCertificate& cert) {
  return Json{
      {"certificateData", to_json(group, cert.payload)},
      {"domainCertificate",
       {{"transaction", ledger::to_json(cert.transaction)},
        {"blockNo", cert.block_no},
        {"inclusionProof", merkle::proof_to_json(cert.inclusion_proof)}}},
  };
}

BlockPkiCertificate certificate_from_json(const crypto::Group& group, const Json& j) {
  try {
    BlockPkiCertificate c;
    c.payload = payload_from_json(group, j.at("certificateData"));
    const Json& d = j.at("domainCertificate");
    c.transaction = ledger::transaction_from_json(d.at("transaction"));
    c.block_no = d.at("blockNo").get<std::uint64_t>();
    c.inclusion_proof = merkle::proof_from_json(d.at("inclusionProof"));
    return c;
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("certificate: ") + ex.what());
  }
}

std::string store_certificate_file(const crypto::Group& group, const BlockPkiCertificate& cert) {
  return to_json(group, cert).dump(2) + "\n";
}

BlockPkiCertificate load_certificate_file(const crypto::Group& group, const std::string& text) {
  return certificate_from_json(group, parse_json(text, "certificate file"));
}

// ---- CA directory ----

void CaDirectory::add(CaIdentity ca) {
  if (by_address_.count(ca.address) || by_id_.count(ca.id))
    throw Error(ErrorCode::InvalidParams, "CA " + ca.id + " registered twice");
  by_address_[ca.address] = cas_.size();
  by_id_[ca.id] = cas_.size();
  cas_.push_back(std::move(ca));
}

const CaIdentity& CaDirectory::by_address(const Address& a) const {
  auto it = by_address_.find(a);
  if (it == by_address_.end()) throw Error(ErrorCode::InvalidParams, "no CA at " + a.hex());
  return cas_[it->second];
}

const CaIdentity& CaDirectory::by_id(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw Error(ErrorCode::InvalidParams, "no CA named " + id);
  return cas_[it->second];
}

// ---- signing round ----

SigningContext signing_context(const crypto::GroupParams& params, const contracts::DomainContractState& st,
                               const CaDirectory& directory) {
  if (!st.all_cert_nonces) throw Error(ErrorCode::InvalidParams, "nonces not gathered yet");
  SigningContext ctx;
  if (st.first_t_mode) {
    for (const auto& [ca, n] : st.cert_pub_nonces) ctx.signers.push_back(ca);
  } else {
    ctx.signers = st.authorized_cas;
  }
  for (const auto& ca : ctx.signers) {
    ctx.issuers.push_back(directory.by_address(ca).id);
    ctx.nonces.push_back(*st.nonce_of(ca));
  }
  ctx.message = canonical_encode(st.cert_data, ctx.issuers);
  ctx.n_bar = crypto::combine_nonces(params, ctx.nonces);
  ctx.e = crypto::challenge(params, ctx.n_bar, as_view(ctx.message));
  return ctx;
}

Bytes nonce_derivation_message(const contracts::DomainContractState& st) {
  Bytes m = to_bytes(canonical_dump(to_json(st.cert_data)));
  append(m, st.address.raw());
  append_u64_be(m, st.round);
  return m;
}

CertificatePayload combine_from_contract(const crypto::GroupParams& params, const contracts::DomainContractState& st,
                                         const CaDirectory& directory) {
  const SigningContext ctx = signing_context(params, st, directory);
  std::vector<crypto::PartialSignature> partials;
  std::vector<crypto::GroupElement> keys;
  std::string bad;
  for (std::size_t i = 0; i < ctx.signers.size(); ++i) {
    const CaIdentity& ca = directory.by_address(ctx.signers[i]);
    const auto s = st.signature_of(ctx.signers[i]);
    if (!s) throw Error(ErrorCode::AssemblyFailed, "missing partial signature from " + ca.id);
    if (!crypto::verify_partial(params, *s, ctx.e, ctx.nonces[i], ca.public_key)) bad += (bad.empty() ? "" : ",") + ca.id;
    partials.push_back({ca.id, *s});
    keys.push_back(ca.public_key);
  }
  if (!bad.empty()) throw Error(ErrorCode::AssemblyFailed, "invalid partial signature from " + bad);

  CertificatePayload p;
  p.data = st.cert_data;
  p.issuers = ctx.issuers;
  p.signature = crypto::combine_partials(params, partials, ctx.e);
  if (!crypto::verify_multisig(params, p.signature, crypto::combine_keys(params, keys), as_view(ctx.message)))
    throw Error(ErrorCode::AssemblyFailed, "combined signature does not verify");
  return p;
}

BlockPkiCertificate finalize_certificate(const ledger::Chain& chain, const CertificatePayload& payload,
                                         const Hash256& storage_tx) {
  auto [height, proof] = chain.get_inclusion_proof(storage_tx);
  const auto loc = chain.store().find(storage_tx);
  BlockPkiCertificate c;
  c.payload = payload;
  c.transaction = chain.store().at(loc->height).transactions.at(loc->index);
  c.block_no = height;
  c.inclusion_proof = std::move(proof);
  return c;
}

// ---- trust store ----

std::string to_string(ClientMode m) {
  switch (m) {
    case ClientMode::Unaware: return "unaware";
    case ClientMode::Light: return "light";
    case ClientMode::Full: return "full";
  }
  return "?";
}

ClientMode client_mode_from_string(const std::string& s) {
  if (s == "unaware") return ClientMode::Unaware;
  if (s == "light") return ClientMode::Light;
  if (s == "full") return ClientMode::Full;
  throw Error(ErrorCode::ParseError, "unknown client mode '" + s + "'");
}

std::string to_string(RejectReason r) {
  switch (r) {
    case RejectReason::WrongDomain: return "WrongDomain";
    case RejectReason::Expired: return "Expired";
    case RejectReason::NotYetValid: return "NotYetValid";
    case RejectReason::UntrustedIssuer: return "UntrustedIssuer";
    case RejectReason::BelowThreshold: return "BelowThreshold";
    case RejectReason::BadSignature: return "BadSignature";
    case RejectReason::BadInclusion: return "BadInclusion";
    case RejectReason::UnknownBlock: return "UnknownBlock";
  }
  return "?";
}

ClientTrustStore::ClientTrustStore(const crypto::GroupParams& params, std::vector<TrustedCa> cas, ClientMode mode,
                                   std::size_t threshold_policy, bool check_pops)
    : mode_(mode), threshold_policy_(threshold_policy) {
  for (auto& ca : cas) {
    if (check_pops && (ca.pop.owner_id != ca.id || !crypto::verify_pop(params, ca.pop, ca.public_key)))
      throw Error(ErrorCode::InvalidParams, "proof of possession for " + ca.id + " does not verify");
    std::string id = ca.id;
    if (!cas_.emplace(id, std::move(ca)).second) throw Error(ErrorCode::InvalidParams, "CA " + id + " listed twice");
  }
}

const TrustedCa* ClientTrustStore::find(const std::string& id) const {
  auto it = cas_.find(id);
  return it == cas_.end() ? nullptr : &it->second;
}

void ClientTrustStore::sync_headers(std::vector<ledger::BlockHeader> headers) {
  if (!ledger::headers_linked(headers)) throw Error(ErrorCode::ChainIntegrity, "header chain does not link");
  if (!headers.empty() && headers.front().height != 0)
    throw Error(ErrorCode::ChainIntegrity, "header chain must start at genesis");
  headers_ = std::move(headers);
}

void ClientTrustStore::sync_chain(std::shared_ptr<const ledger::BlockStore> chain) {
  sync_headers(chain->header_chain());
  full_chain_ = std::move(chain);
}

Json to_json(const crypto::Group& group, const TrustedCa& ca) {
  Bytes sig = group.encode_scalar(ca.pop.pop_sig.e);
  append(sig, group.encode_scalar(ca.pop.pop_sig.s));
  return Json{{"id", ca.id}, {"publicKey", to_hex(ca.public_key.encoding)}, {"pop", to_hex(sig)}};
}

Json truststore_json(const crypto::Group& group, const std::vector<TrustedCa>& cas, std::size_t threshold) {
  Json list = Json::array();
  for (const auto& ca : cas) list.push_back(to_json(group, ca));
  return Json{{"threshold", threshold}, {"group", group.name()}, {"cas", list}};
}

std::vector<TrustedCa> trusted_cas_from_json(const crypto::Group& group, const Json& j) {
  std::vector<TrustedCa> out;
  try {
    for (const auto& c : j.at("cas")) {
      TrustedCa ca;
      ca.id = c.at("id").get<std::string>();
      ca.public_key = group.decode_element(from_hex(c.at("publicKey").get<std::string>()));
      const Bytes sig = from_hex(c.at("pop").get<std::string>());
      const std::size_t w = group.scalar_width();
      if (sig.size() != 2 * w) throw Error(ErrorCode::ParseError, "pop of " + ca.id + " has the wrong length");
      ca.pop.owner_id = ca.id;
      ca.pop.pop_sig.e = group.decode_scalar(ByteView(sig).subspan(0, w));
      ca.pop.pop_sig.s = group.decode_scalar(ByteView(sig).subspan(w, w));
      out.push_back(std::move(ca));
    }
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("trust store: ") + ex.what());
  } catch (const Error& err) {
    if (err.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, "trust store: " + err.detail());
  }
  return out;
}

// ---- verification ----

namespace {

VerifyResult reject(RejectReason r) { return VerifyResult{false, r, {}}; }

// The logged transaction must be a storage call carrying exactly this payload.
bool transaction_carries(const crypto::Group& group, const ledger::Transaction& tx, const CertificatePayload& p) {
  if (tx.recipient != contracts::Runtime::storage_address()) return false;
  try {
    const Json call = Json::parse(tx.payload);
    if (call.at("method") != "storeCertificate") return false;
    return payload_from_json(group, call.at("args")) == p;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

VerifyResult verify_certificate(const crypto::GroupParams& params, const BlockPkiCertificate& cert,
                                const ClientTrustStore& trust, const std::string& visited_domain, std::int64_t now) {
  const CertificatePayload& p = cert.payload;
  if (visited_domain != p.data.subject_name) return reject(RejectReason::WrongDomain);
  if (now < p.data.not_before) return reject(RejectReason::NotYetValid);
  if (now > p.data.not_after) return reject(RejectReason::Expired);

  std::vector<crypto::GroupElement> keys;
  for (const auto& id : p.issuers) {
    const TrustedCa* ca = trust.find(id);
    if (!ca) return reject(RejectReason::UntrustedIssuer);
    keys.push_back(ca->public_key);
  }
  // A repeated issuer would let one key count several times towards T.
  const std::set<std::string> distinct(p.issuers.begin(), p.issuers.end());
  if (distinct.size() != p.issuers.size() || distinct.size() < trust.threshold_policy())
    return reject(RejectReason::BelowThreshold);

  crypto::MultiSignature sig = p.signature;
  sig.signer_ids = p.issuers;
  const std::string m = canonical_encode(p);
  if (!crypto::verify_multisig(params, sig, crypto::combine_keys(params, keys), as_view(m)))
    return reject(RejectReason::BadSignature);

  if (trust.mode() == ClientMode::Unaware)
    return VerifyResult{true, std::nullopt, "inclusion proof not checked (unaware client)"};

  const auto& headers = trust.headers();
  if (cert.block_no >= headers.size()) return reject(RejectReason::UnknownBlock);
  const Hash256 leaf = cert.transaction.hash();
  if (!merkle::verify_inclusion(headers[cert.block_no].tx_root, leaf, cert.inclusion_proof))
    return reject(RejectReason::BadInclusion);
  if (!transaction_carries(params.g(), cert.transaction, p)) return reject(RejectReason::BadInclusion);

  if (trust.mode() == ClientMode::Full) {
    const ledger::BlockStore* chain = trust.full_chain();
    if (!chain || !chain->has_height(cert.block_no)) return reject(RejectReason::UnknownBlock);
    const auto loc = chain->find(leaf);
    if (!loc || loc->height != cert.block_no) return reject(RejectReason::BadInclusion);
    if (!chain->at(loc->height).transactions[loc->index].success) return reject(RejectReason::BadInclusion);
  }
  return VerifyResult{true, std::nullopt, {}};
}

}  // namespace blockpki::certs
