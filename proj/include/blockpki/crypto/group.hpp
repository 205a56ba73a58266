#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <span>
#include <string_view>

#include "blockpki/common.hpp"

namespace blockpki::crypto {

using BigInt = boost::multiprecision::cpp_int;

// Integer modulo the group order. Groups keep values reduced into [0, q-1].
struct Scalar {
  BigInt value;

  Scalar() = default;
  explicit Scalar(BigInt v) : value(std::move(v)) {}
  bool is_zero() const { return value.is_zero(); }
  friend bool operator==(const Scalar&, const Scalar&) = default;
};

// A group element held in its canonical fixed-width wire encoding.
struct GroupElement {
  Bytes encoding;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend bool operator<(const GroupElement& a, const GroupElement& b) {
    return a.encoding < b.encoding;
  }
};

// Prime-order group written multiplicatively: op() is the group law and pow() is
// repeated application. Elliptic-curve groups map these onto point addition and
// scalar multiplication.
class Group {
 public:
  virtual ~Group() = default;

  virtual std::string_view name() const = 0;
  virtual const BigInt& order() const = 0;
  virtual std::size_t scalar_width() const = 0;
  virtual std::size_t element_width() const = 0;

  virtual GroupElement generator() const = 0;
  virtual GroupElement identity() const = 0;
  virtual bool is_valid(const GroupElement& a) const = 0;

  virtual GroupElement op(const GroupElement& a, const GroupElement& b) const = 0;
  virtual GroupElement inverse(const GroupElement& a) const = 0;
  virtual GroupElement pow(const GroupElement& base, const Scalar& k) const = 0;
  virtual GroupElement pow_gen(const Scalar& k) const { return pow(generator(), k); }

  // g^a * h^b, the shape of every Schnorr verification equation.
  virtual GroupElement double_pow(const Scalar& a, const GroupElement& h, const Scalar& b) const {
    return op(pow_gen(a), pow(h, b));
  }

  // Product of all elements; identity for an empty span.
  virtual GroupElement product(std::span<const GroupElement> elements) const;

  Scalar reduce(const BigInt& v) const;
  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;

  Bytes encode_scalar(const Scalar& s) const;
  // Rejects encodings of the wrong width or values >= q.
  Scalar decode_scalar(ByteView bytes) const;
  // Throws InvalidElement if the bytes are not a member of the group.
  GroupElement decode_element(ByteView bytes) const;
};

// Order-11 subgroup of Z_23^* generated by 2. Every property can be checked by
// enumeration in this group.
std::shared_ptr<const Group> tiny_group();

// secp256k1, the production group.
std::shared_ptr<const Group> secp256k1_group();

// "tiny" or "secp256k1"; throws InvalidParams otherwise.
std::shared_ptr<const Group> group_by_name(std::string_view name);

BigInt bigint_from_bytes(ByteView bytes);
Bytes bigint_to_bytes(const BigInt& v, std::size_t width);

}  // namespace blockpki::crypto
