#include "blockpki/merkle.hpp"

#include "blockpki/error.hpp"
#include "blockpki/hash.hpp"

namespace blockpki::merkle {
namespace {

constexpr std::uint8_t kLeafPrefix = 0x00;
constexpr std::uint8_t kNodePrefix = 0x01;

std::size_t parent_count(std::size_t n) { return (n + 1) / 2; }

void hash_level_serial(const std::vector<Hash256>& below, std::vector<Hash256>& above) {
  const std::size_t n = below.size();
  for (std::size_t i = 0; i < above.size(); ++i) {
    const Hash256& left = below[2 * i];
    const Hash256& right = (2 * i + 1 < n) ? below[2 * i + 1] : left;
    above[i] = node_hash(left, right);
  }
}

void hash_level_parallel(const std::vector<Hash256>& below, std::vector<Hash256>& above) {
  const std::size_t n = below.size();
  const auto count = static_cast<std::ptrdiff_t>(above.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const Hash256& left = below[2 * u];
    const Hash256& right = (2 * u + 1 < n) ? below[2 * u + 1] : left;
    above[u] = node_hash(left, right);
  }
}

template <typename LevelFn>
std::vector<std::vector<Hash256>> build_levels(std::vector<Hash256> leaves, LevelFn&& hash_level) {
  if (leaves.empty()) {
    throw Error(ErrorCode::EmptyBlock, "cannot build a Merkle tree without leaves");
  }
  std::vector<std::vector<Hash256>> levels;
  levels.push_back(std::move(leaves));
  while (levels.back().size() > 1) {
    std::vector<Hash256> above(parent_count(levels.back().size()));
    hash_level(levels.back(), above);
    levels.push_back(std::move(above));
  }
  return levels;
}

}  // namespace

Hash256 leaf_hash(ByteView data) {
  Sha256 h;
  h.update(kLeafPrefix);
  h.update(data);
  return h.finish();
}

Hash256 node_hash(const Hash256& left, const Hash256& right) {
  Sha256 h;
  h.update(kNodePrefix);
  h.update(left);
  h.update(right);
  return h.finish();
}

Hash256 empty_root() { return leaf_hash(ByteView{}); }

MerkleTree MerkleTree::build(std::vector<Hash256> leaves) {
  return MerkleTree(build_levels(std::move(leaves), [](const auto& below, auto& above) {
    if (above.size() >= kParallelThreshold) {
      hash_level_parallel(below, above);
    } else {
      hash_level_serial(below, above);
    }
  }));
}

MerkleTree MerkleTree::build_serial(std::vector<Hash256> leaves) {
  return MerkleTree(build_levels(std::move(leaves), hash_level_serial));
}

InclusionProof MerkleTree::prove(std::size_t index) const {
  if (index >= leaf_count()) {
    throw Error(ErrorCode::BadIndex, "leaf index " + std::to_string(index) + " out of range (" +
                                         std::to_string(leaf_count()) + " leaves)");
  }
  InclusionProof proof{index, {}};
  std::size_t pos = index;
  for (std::size_t lvl = 0; lvl + 1 < levels_.size(); ++lvl) {
    const auto& nodes = levels_[lvl];
    if (pos % 2 == 1) {
      proof.siblings.push_back({nodes[pos - 1], Side::Left});
    } else {
      const std::size_t sib = pos + 1 < nodes.size() ? pos + 1 : pos;
      proof.siblings.push_back({nodes[sib], Side::Right});
    }
    pos /= 2;
  }
  return proof;
}

bool verify_inclusion(const Hash256& root, const Hash256& leaf, const InclusionProof& proof) {
  if (proof.siblings.size() >= 64 || (proof.leaf_index >> proof.siblings.size()) != 0) {
    return false;
  }
  Hash256 acc = leaf;
  std::size_t pos = proof.leaf_index;
  for (const auto& step : proof.siblings) {
    const bool sibling_left = (pos % 2 == 1);
    if (sibling_left != (step.side == Side::Left)) {
      return false;
    }
    acc = sibling_left ? node_hash(step.hash, acc) : node_hash(acc, step.hash);
    pos /= 2;
  }
  return acc == root;
}

Json proof_to_json(const InclusionProof& proof) {
  Json siblings = Json::array();
  for (const auto& s : proof.siblings) {
    siblings.push_back({{"hash_hex", to_hex(s.hash)}, {"side", s.side == Side::Left ? "left" : "right"}});
  }
  return Json{{"leaf_index", proof.leaf_index}, {"siblings", std::move(siblings)}};
}

InclusionProof proof_from_json(const Json& j) {
  try {
    InclusionProof proof;
    proof.leaf_index = j.at("leaf_index").get<std::size_t>();
    for (const auto& s : j.at("siblings")) {
      const std::string side = s.at("side").get<std::string>();
      if (side != "left" && side != "right") {
        throw Error(ErrorCode::ParseError, "sibling side must be 'left' or 'right'");
      }
      proof.siblings.push_back(
          {hash_from_hex(s.at("hash_hex").get<std::string>()), side == "left" ? Side::Left : Side::Right});
    }
    return proof;
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("inclusion proof: ") + ex.what());
  }
}

}  // namespace blockpki::merkle
