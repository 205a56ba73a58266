#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <algorithm>
#include <memory>

#include "blockpki/crypto/group.hpp"
#include "blockpki/error.hpp"

namespace blockpki::crypto {
namespace {

constexpr std::size_t kScalarWidth = 32;
constexpr std::size_t kElementWidth = 33;  // SEC1 compressed; all-zero encodes the identity

struct BnCtxDeleter {
  void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct BnDeleter {
  void operator()(BIGNUM* p) const { BN_clear_free(p); }
};
struct PointDeleter {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
struct GroupDeleter {
  void operator()(EC_GROUP* p) const { EC_GROUP_free(p); }
};

using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;

void check(int rc, const char* what) {
  if (rc != 1) {
    throw std::runtime_error(std::string("OpenSSL failure: ") + what);
  }
}

class Secp256k1Group final : public Group {
 public:
  Secp256k1Group() : group_(EC_GROUP_new_by_curve_name(NID_secp256k1)) {
    if (!group_) {
      throw std::runtime_error("secp256k1 unavailable in OpenSSL");
    }
    BnCtxPtr ctx(BN_CTX_new());
    const BIGNUM* n = EC_GROUP_get0_order(group_.get());
    std::array<std::uint8_t, kScalarWidth> buf{};
    BN_bn2binpad(n, buf.data(), static_cast<int>(buf.size()));
    order_ = bigint_from_bytes(buf);
    generator_ = encode(EC_GROUP_get0_generator(group_.get()), ctx.get());
  }

  std::string_view name() const override { return "secp256k1"; }
  const BigInt& order() const override { return order_; }
  std::size_t scalar_width() const override { return kScalarWidth; }
  std::size_t element_width() const override { return kElementWidth; }

  GroupElement generator() const override { return generator_; }
  GroupElement identity() const override { return GroupElement{Bytes(kElementWidth, 0)}; }

  bool is_valid(const GroupElement& a) const override {
    if (a.encoding.size() != kElementWidth) return false;
    BnCtxPtr ctx(BN_CTX_new());
    return try_decode(a, ctx.get()) != nullptr;
  }

  GroupElement op(const GroupElement& a, const GroupElement& b) const override {
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr pa = decode(a, ctx.get());
    PointPtr pb = decode(b, ctx.get());
    PointPtr r(EC_POINT_new(group_.get()));
    check(EC_POINT_add(group_.get(), r.get(), pa.get(), pb.get(), ctx.get()), "EC_POINT_add");
    return encode(r.get(), ctx.get());
  }

  GroupElement inverse(const GroupElement& a) const override {
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr p = decode(a, ctx.get());
    check(EC_POINT_invert(group_.get(), p.get(), ctx.get()), "EC_POINT_invert");
    return encode(p.get(), ctx.get());
  }

  GroupElement pow(const GroupElement& base, const Scalar& k) const override {
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr p = decode(base, ctx.get());
    BnPtr bk = to_bn(k);
    PointPtr r(EC_POINT_new(group_.get()));
    check(EC_POINT_mul(group_.get(), r.get(), nullptr, p.get(), bk.get(), ctx.get()), "EC_POINT_mul");
    return encode(r.get(), ctx.get());
  }

  GroupElement pow_gen(const Scalar& k) const override {
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr bk = to_bn(k);
    PointPtr r(EC_POINT_new(group_.get()));
    check(EC_POINT_mul(group_.get(), r.get(), bk.get(), nullptr, nullptr, ctx.get()), "EC_POINT_mul");
    return encode(r.get(), ctx.get());
  }

  GroupElement double_pow(const Scalar& a, const GroupElement& h, const Scalar& b) const override {
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr ph = decode(h, ctx.get());
    BnPtr ba = to_bn(a);
    BnPtr bb = to_bn(b);
    PointPtr r(EC_POINT_new(group_.get()));
    check(EC_POINT_mul(group_.get(), r.get(), ba.get(), ph.get(), bb.get(), ctx.get()), "EC_POINT_mul");
    return encode(r.get(), ctx.get());
  }

  GroupElement product(std::span<const GroupElement> elements) const override {
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr acc(EC_POINT_new(group_.get()));
    check(EC_POINT_set_to_infinity(group_.get(), acc.get()), "EC_POINT_set_to_infinity");
    for (const auto& e : elements) {
      PointPtr p = decode(e, ctx.get());
      check(EC_POINT_add(group_.get(), acc.get(), acc.get(), p.get(), ctx.get()), "EC_POINT_add");
    }
    return encode(acc.get(), ctx.get());
  }

 private:
  BnPtr to_bn(const Scalar& k) const {
    const Bytes raw = bigint_to_bytes(reduce(k.value).value, kScalarWidth);
    BnPtr bn(BN_bin2bn(raw.data(), static_cast<int>(raw.size()), nullptr));
    if (!bn) throw std::runtime_error("BN_bin2bn failed");
    return bn;
  }

  PointPtr try_decode(const GroupElement& a, BN_CTX* ctx) const {
    if (a.encoding.size() != kElementWidth) return nullptr;
    PointPtr p(EC_POINT_new(group_.get()));
    if (std::all_of(a.encoding.begin(), a.encoding.end(), [](std::uint8_t b) { return b == 0; })) {
      EC_POINT_set_to_infinity(group_.get(), p.get());
      return p;
    }
    if (a.encoding[0] != 0x02 && a.encoding[0] != 0x03) return nullptr;
    if (EC_POINT_oct2point(group_.get(), p.get(), a.encoding.data(), a.encoding.size(), ctx) != 1) {
      return nullptr;
    }
    return p;
  }

  PointPtr decode(const GroupElement& a, BN_CTX* ctx) const {
    PointPtr p = try_decode(a, ctx);
    if (!p) {
      throw Error(ErrorCode::InvalidElement, "not a secp256k1 point encoding");
    }
    return p;
  }

  GroupElement encode(const EC_POINT* p, BN_CTX* ctx) const {
    if (EC_POINT_is_at_infinity(group_.get(), p) == 1) {
      return identity();
    }
    Bytes out(kElementWidth);
    const std::size_t n = EC_POINT_point2oct(group_.get(), p, POINT_CONVERSION_COMPRESSED, out.data(),
                                             out.size(), ctx);
    if (n != kElementWidth) {
      throw std::runtime_error("EC_POINT_point2oct failed");
    }
    return GroupElement{std::move(out)};
  }

  std::unique_ptr<EC_GROUP, GroupDeleter> group_;
  BigInt order_;
  GroupElement generator_;
};

}  // namespace

std::shared_ptr<const Group> secp256k1_group() {
  static const auto group = std::make_shared<const Secp256k1Group>();
  return group;
}

}  // namespace blockpki::crypto
