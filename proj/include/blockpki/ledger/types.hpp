#pragma once

#include <string>
#include <vector>

#include "blockpki/common.hpp"
#include "blockpki/json_util.hpp"

namespace blockpki::ledger {

struct Account {
  Address address;
  Amount balance = 0;
  std::uint64_t nonce = 0;
};

struct Transaction {
  Address sender;
  Address recipient;
  std::uint64_t nonce = 0;
  Amount value = 0;
  std::int64_t gas_limit = 0;
  std::string payload;

  // Receipt, filled when the transaction executes.
  std::int64_t gas_used = 0;
  Amount fee = 0;
  bool success = false;

  // Leaf hash of the canonical encoding of the submitted fields (receipt excluded).
  Hash256 hash() const;
  std::string canonical_encoding() const;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Event {
  std::string kind;
  Address contract;
  std::uint64_t block_height = 0;
  std::uint32_t tx_index = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct BlockHeader {
  std::uint64_t height = 0;
  Hash256 parent_hash{};
  Hash256 tx_root{};
  SimTime timestamp_ms = 0;

  Hash256 hash() const;
  friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

struct Block {
  BlockHeader header;
  std::vector<Transaction> transactions;
  std::vector<Event> events;

  friend bool operator==(const Block&, const Block&) = default;
};

Hash256 compute_tx_root(const std::vector<Transaction>& txs);

Json to_json(const Transaction& tx);
Transaction transaction_from_json(const Json& j);
Json to_json(const BlockHeader& h);
BlockHeader header_from_json(const Json& j);
Json to_json(const Block& b);
Block block_from_json(const Json& j);

}  // namespace blockpki::ledger
