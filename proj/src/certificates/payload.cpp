#include "blockpki/certificates/payload.hpp"

#include "blockpki/error.hpp"

namespace blockpki::certs {

void CertData::validate() const {
  if (subject_name.empty()) throw Error(ErrorCode::InvalidParams, "empty subject name");
  if (!(not_before < not_after)) throw Error(ErrorCode::InvalidParams, "notBefore must precede notAfter");
  if (public_key.encoding.empty()) throw Error(ErrorCode::InvalidParams, "missing public key");
}

std::size_t CertData::stored_size() const { return subject_name.size() + public_key.encoding.size() + 16; }

Json to_json(const CertData& d) {
  return Json{
      {"subjectName", d.subject_name},
      {"publicKey", to_hex(d.public_key.encoding)},
      {"notBefore", d.not_before},
      {"notAfter", d.not_after},
  };
}

CertData cert_data_from_json(const Json& j) {
  try {
    CertData d;
    d.subject_name = j.at("subjectName").get<std::string>();
    d.public_key.encoding = from_hex(j.at("publicKey").get<std::string>());
    d.not_before = j.at("notBefore").get<std::int64_t>();
    d.not_after = j.at("notAfter").get<std::int64_t>();
    return d;
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("certificate data: ") + ex.what());
  }
}

std::string canonical_encode(const CertData& data, const std::vector<std::string>& issuers) {
  Json j = to_json(data);
  j["issuers"] = issuers;
  return canonical_dump(j);
}

Json to_json(const crypto::Group& group, const CertificatePayload& p) {
  Json j = to_json(p.data);
  j["issuers"] = p.issuers;
  Bytes sig = group.encode_scalar(p.signature.e);
  append(sig, group.encode_scalar(p.signature.s_bar));
  j["schnorrSignature"] = to_hex(sig);
  return j;
}

CertificatePayload payload_from_json(const crypto::Group& group, const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "certificate payload must be an object");
  CertificatePayload p;
  p.data = cert_data_from_json(j);
  try {
    p.issuers = j.at("issuers").get<std::vector<std::string>>();
    const Bytes sig = from_hex(j.at("schnorrSignature").get<std::string>());
    const std::size_t w = group.scalar_width();
    if (sig.size() != 2 * w) throw Error(ErrorCode::ParseError, "schnorrSignature has the wrong length");
    p.signature.e = group.decode_scalar(ByteView(sig).subspan(0, w));
    p.signature.s_bar = group.decode_scalar(ByteView(sig).subspan(w, w));
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("certificate payload: ") + ex.what());
  } catch (const Error& err) {
    if (err.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, "certificate payload: " + std::string(err.what()));
  }
  p.signature.signer_ids = p.issuers;
  return p;
}

std::size_t stored_size(const crypto::Group& group, const CertificatePayload& p) {
  std::size_t n = p.data.stored_size() + 2 * group.scalar_width();
  for (const auto& id : p.issuers) n += id.size();
  return n;
}

}  // namespace blockpki::certs
