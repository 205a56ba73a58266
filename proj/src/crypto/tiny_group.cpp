#include <cstdint>

#include "blockpki/crypto/group.hpp"
#include "blockpki/error.hpp"

namespace blockpki::crypto {
namespace {

constexpr std::uint32_t kModulus = 23;
constexpr std::uint32_t kOrder = 11;
constexpr std::uint32_t kGenerator = 2;
constexpr std::size_t kWidth = 2;

std::uint32_t powmod(std::uint32_t base, std::uint32_t exp) {
  std::uint32_t result = 1;
  base %= kModulus;
  while (exp > 0) {
    if (exp & 1U) result = (result * base) % kModulus;
    base = (base * base) % kModulus;
    exp >>= 1;
  }
  return result;
}

class TinyGroup final : public Group {
 public:
  std::string_view name() const override { return "tiny"; }
  const BigInt& order() const override { return order_; }
  std::size_t scalar_width() const override { return kWidth; }
  std::size_t element_width() const override { return kWidth; }

  GroupElement generator() const override { return encode(kGenerator); }
  GroupElement identity() const override { return encode(1); }

  bool is_valid(const GroupElement& a) const override {
    if (a.encoding.size() != kWidth) return false;
    const std::uint32_t v = raw(a);
    return v >= 1 && v < kModulus && powmod(v, kOrder) == 1;
  }

  GroupElement op(const GroupElement& a, const GroupElement& b) const override {
    return encode((value(a) * value(b)) % kModulus);
  }

  GroupElement inverse(const GroupElement& a) const override {
    return encode(powmod(value(a), kModulus - 2));
  }

  GroupElement pow(const GroupElement& base, const Scalar& k) const override {
    const auto e = static_cast<std::uint32_t>(reduce(k.value).value);
    return encode(powmod(value(base), e));
  }

 private:
  static std::uint32_t raw(const GroupElement& a) {
    return (static_cast<std::uint32_t>(a.encoding[0]) << 8) | a.encoding[1];
  }

  std::uint32_t value(const GroupElement& a) const {
    if (!is_valid(a)) {
      throw Error(ErrorCode::InvalidElement, "not a member of the order-11 subgroup");
    }
    return raw(a);
  }

  static GroupElement encode(std::uint32_t v) {
    return GroupElement{Bytes{static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v & 0xFF)}};
  }

  BigInt order_{kOrder};
};

}  // namespace

std::shared_ptr<const Group> tiny_group() {
  static const auto group = std::make_shared<const TinyGroup>();
  return group;
}

}  // namespace blockpki::crypto
