#pragma once

#include <vector>

#include "blockpki/common.hpp"
#include "blockpki/json_util.hpp"

namespace blockpki::merkle {

enum class Side { Left, Right };

struct ProofStep {
  Hash256 hash;
  Side side;  // position of the sibling relative to the running hash
  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

struct InclusionProof {
  std::size_t leaf_index = 0;
  std::vector<ProofStep> siblings;
  friend bool operator==(const InclusionProof&, const InclusionProof&) = default;
};

// Leaf and interior hashes are domain separated (0x00 / 0x01 prefix).
Hash256 leaf_hash(ByteView data);
Hash256 node_hash(const Hash256& left, const Hash256& right);
// Root recorded for a block without transactions: the leaf hash of the empty string.
Hash256 empty_root();

// Level-by-level Merkle tree over precomputed leaf hashes. An odd node is paired
// with itself.
class MerkleTree {
 public:
  // Levels with at least this many parent nodes are hashed with OpenMP.
  static constexpr std::size_t kParallelThreshold = 256;

  // Throws EmptyBlock on an empty leaf list.
  static MerkleTree build(std::vector<Hash256> leaves);
  // Serial reference; produces identical levels.
  static MerkleTree build_serial(std::vector<Hash256> leaves);

  const Hash256& root() const { return levels_.back().front(); }
  std::size_t leaf_count() const { return levels_.front().size(); }
  const std::vector<std::vector<Hash256>>& levels() const { return levels_; }

  // Throws BadIndex when index >= leaf_count().
  InclusionProof prove(std::size_t index) const;

 private:
  explicit MerkleTree(std::vector<std::vector<Hash256>> levels) : levels_(std::move(levels)) {}

  std::vector<std::vector<Hash256>> levels_;
};

bool verify_inclusion(const Hash256& root, const Hash256& leaf, const InclusionProof& proof);

// {leaf_index, siblings: [{hash_hex, side}]}
Json proof_to_json(const InclusionProof& proof);
InclusionProof proof_from_json(const Json& j);

}  // namespace blockpki::merkle
