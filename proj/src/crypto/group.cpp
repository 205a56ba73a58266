#include "blockpki/crypto/group.hpp"

#include "blockpki/error.hpp"

namespace blockpki::crypto {

BigInt bigint_from_bytes(ByteView bytes) {
  BigInt out;
  if (!bytes.empty()) {
    boost::multiprecision::import_bits(out, bytes.begin(), bytes.end(), 8, true);
  }
  return out;
}

Bytes bigint_to_bytes(const BigInt& v, std::size_t width) {
  if (v < 0) {
    throw Error(ErrorCode::InvalidScalar, "negative value cannot be encoded");
  }
  Bytes raw;
  if (!v.is_zero()) {
    boost::multiprecision::export_bits(v, std::back_inserter(raw), 8, true);
  }
  if (raw.size() > width) {
    throw Error(ErrorCode::InvalidScalar, "value does not fit in " + std::to_string(width) + " bytes");
  }
  Bytes out(width - raw.size(), 0);
  out.insert(out.end(), raw.begin(), raw.end());
  return out;
}

GroupElement Group::product(std::span<const GroupElement> elements) const {
  GroupElement acc = identity();
  for (const auto& e : elements) {
    acc = op(acc, e);
  }
  return acc;
}

Scalar Group::reduce(const BigInt& v) const {
  BigInt r = v % order();
  if (r < 0) {
    r += order();
  }
  return Scalar(std::move(r));
}

Scalar Group::add(const Scalar& a, const Scalar& b) const { return reduce(a.value + b.value); }
Scalar Group::sub(const Scalar& a, const Scalar& b) const { return reduce(a.value - b.value); }
Scalar Group::mul(const Scalar& a, const Scalar& b) const { return reduce(a.value * b.value); }

Bytes Group::encode_scalar(const Scalar& s) const {
  return bigint_to_bytes(reduce(s.value).value, scalar_width());
}

Scalar Group::decode_scalar(ByteView bytes) const {
  if (bytes.size() != scalar_width()) {
    throw Error(ErrorCode::InvalidScalar, "scalar must be " + std::to_string(scalar_width()) + " bytes");
  }
  BigInt v = bigint_from_bytes(bytes);
  if (v >= order()) {
    throw Error(ErrorCode::InvalidScalar, "scalar not reduced modulo the group order");
  }
  return Scalar(std::move(v));
}

GroupElement Group::decode_element(ByteView bytes) const {
  GroupElement e{Bytes(bytes.begin(), bytes.end())};
  if (bytes.size() != element_width() || !is_valid(e)) {
    throw Error(ErrorCode::InvalidElement, "bytes do not encode a member of " + std::string(name()));
  }
  return e;
}

std::shared_ptr<const Group> group_by_name(std::string_view name) {
  if (name == "tiny") return tiny_group();
  if (name == "secp256k1") return secp256k1_group();
  throw Error(ErrorCode::InvalidParams, "unknown group '" + std::string(name) + "'");
}

}  // namespace blockpki::crypto
