#include "blockpki/ledger/types.hpp"

#include "blockpki/error.hpp"
#include "blockpki/hash.hpp"
#include "blockpki/merkle.hpp"

namespace blockpki::ledger {

std::string Transaction::canonical_encoding() const {
  Json j{
      {"sender", sender.hex()},       {"recipient", recipient.hex()}, {"nonce", nonce},
      {"value", value},               {"gas_limit", gas_limit},       {"payload", payload},
  };
  return canonical_dump(j);
}

Hash256 Transaction::hash() const { return merkle::leaf_hash(as_view(canonical_encoding())); }

Hash256 BlockHeader::hash() const {
  Bytes buf = to_bytes("blockpki/header/v1");
  append_u64_be(buf, height);
  append(buf, parent_hash);
  append(buf, tx_root);
  append_u64_be(buf, static_cast<std::uint64_t>(timestamp_ms));
  return sha256(buf);
}

Hash256 compute_tx_root(const std::vector<Transaction>& txs) {
  if (txs.empty()) return merkle::empty_root();
  std::vector<Hash256> leaves;
  leaves.reserve(txs.size());
  for (const auto& tx : txs) leaves.push_back(tx.hash());
  return merkle::MerkleTree::build(std::move(leaves)).root();
}

Json to_json(const Transaction& tx) {
  return Json{
      {"sender", tx.sender.hex()},   {"recipient", tx.recipient.hex()},
      {"nonce", tx.nonce},           {"value", tx.value},
      {"gas_limit", tx.gas_limit},   {"payload", tx.payload},
      {"gas_used", tx.gas_used},     {"fee", tx.fee},
      {"success", tx.success},
  };
}

namespace {

template <typename F>
auto field(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + ex.what());
  }
}

}  // namespace

Transaction transaction_from_json(const Json& j) {
  return field("transaction", [&] {
    Transaction tx;
    tx.sender = Address::from_hex(j.at("sender").get<std::string>());
    tx.recipient = Address::from_hex(j.at("recipient").get<std::string>());
    tx.nonce = j.at("nonce").get<std::uint64_t>();
    tx.value = j.at("value").get<Amount>();
    tx.gas_limit = j.at("gas_limit").get<std::int64_t>();
    tx.payload = j.at("payload").get<std::string>();
    tx.gas_used = j.value("gas_used", std::int64_t{0});
    tx.fee = j.value("fee", Amount{0});
    tx.success = j.value("success", false);
    return tx;
  });
}

Json to_json(const BlockHeader& h) {
  return Json{
      {"height", h.height},
      {"parent_hash", to_hex(h.parent_hash)},
      {"tx_root", to_hex(h.tx_root)},
      {"timestamp_ms", h.timestamp_ms},
  };
}

BlockHeader header_from_json(const Json& j) {
  return field("header", [&] {
    BlockHeader h;
    h.height = j.at("height").get<std::uint64_t>();
    h.parent_hash = hash_from_hex(j.at("parent_hash").get<std::string>());
    h.tx_root = hash_from_hex(j.at("tx_root").get<std::string>());
    h.timestamp_ms = j.at("timestamp_ms").get<SimTime>();
    return h;
  });
}

Json to_json(const Block& b) {
  Json txs = Json::array();
  for (const auto& tx : b.transactions) txs.push_back(to_json(tx));
  Json events = Json::array();
  for (const auto& ev : b.events)
    events.push_back(Json{{"kind", ev.kind},
                          {"contract", ev.contract.hex()},
                          {"block_height", ev.block_height},
                          {"tx_index", ev.tx_index}});
  return Json{{"header", to_json(b.header)}, {"transactions", txs}, {"events", events}};
}

Block block_from_json(const Json& j) {
  return field("block", [&] {
    Block b;
    b.header = header_from_json(j.at("header"));
    for (const auto& t : j.at("transactions")) b.transactions.push_back(transaction_from_json(t));
    for (const auto& e : j.value("events", Json::array())) {
      Event ev;
      ev.kind = e.at("kind").get<std::string>();
      ev.contract = Address::from_hex(e.at("contract").get<std::string>());
      ev.block_height = e.at("block_height").get<std::uint64_t>();
      ev.tx_index = e.at("tx_index").get<std::uint32_t>();
      b.events.push_back(std::move(ev));
    }
    return b;
  });
}

}  // namespace blockpki::ledger
