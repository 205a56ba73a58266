#include "blockpki/ledger/chain.hpp"

#include <cmath>
#include <sstream>

#include "blockpki/error.hpp"

namespace blockpki::ledger {

// ---- BlockStore ----

BlockStore::BlockStore(std::vector<Block> blocks) {
  for (auto& b : blocks) append(std::move(b));
}

void BlockStore::append(Block block) {
  const BlockHeader& h = block.header;
  if (blocks_.empty()) {
    if (h.height != 0 || h.parent_hash != Hash256{})
      throw Error(ErrorCode::ChainIntegrity, "first block must be genesis at height 0 with zero parent");
  } else {
    if (h.height != blocks_.size())
      throw Error(ErrorCode::ChainIntegrity,
                  "height " + std::to_string(h.height) + " where " + std::to_string(blocks_.size()) + " expected");
    if (h.parent_hash != tip_hash())
      throw Error(ErrorCode::ChainIntegrity, "block " + std::to_string(h.height) + " does not link to its parent");
  }
  if (compute_tx_root(block.transactions) != h.tx_root)
    throw Error(ErrorCode::ChainIntegrity, "block " + std::to_string(h.height) + " tx_root mismatch");
  index_block(block);
  blocks_.push_back(std::move(block));
}

void BlockStore::index_block(const Block& block) {
  for (std::size_t i = 0; i < block.transactions.size(); ++i)
    tx_index_.emplace(block.transactions[i].hash(), TxLocation{block.header.height, i});
}

std::vector<BlockHeader> BlockStore::header_chain() const {
  std::vector<BlockHeader> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.header);
  return out;
}

std::optional<TxLocation> BlockStore::find(const Hash256& tx_hash) const {
  auto it = tx_index_.find(tx_hash);
  if (it == tx_index_.end()) return std::nullopt;
  return it->second;
}

std::pair<std::uint64_t, merkle::InclusionProof> BlockStore::inclusion_proof(const Hash256& tx_hash) const {
  auto loc = find(tx_hash);
  if (!loc) throw Error(ErrorCode::UnknownTx, to_hex(tx_hash));
  const Block& b = blocks_[loc->height];
  std::vector<Hash256> leaves;
  leaves.reserve(b.transactions.size());
  for (const auto& tx : b.transactions) leaves.push_back(tx.hash());
  return {loc->height, merkle::MerkleTree::build(std::move(leaves)).prove(loc->index)};
}

std::string BlockStore::dump_jsonl() const {
  std::string out;
  for (const auto& b : blocks_) {
    out += canonical_dump(to_json(b));
    out += '\n';
  }
  return out;
}

BlockStore BlockStore::load_jsonl(const std::string& text) {
  BlockStore store;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      store.append(block_from_json(parse_json(line, where)));
    } catch (const Error& err) {
      throw Error(err.code(), where + ": " + err.detail());
    }
  }
  if (store.blocks_.empty()) throw Error(ErrorCode::ParseError, "chain dump contains no blocks");
  return store;
}

bool headers_linked(const std::vector<BlockHeader>& headers) {
  for (std::size_t i = 1; i < headers.size(); ++i) {
    if (headers[i].height != headers[i - 1].height + 1) return false;
    if (headers[i].parent_hash != headers[i - 1].hash()) return false;
  }
  return true;
}

// ---- Chain ----

// Journaled view of the ledger for one transaction. A revert undoes every
// transfer and drops every event recorded by the contract.
class Chain::BlockExecution : public ExecutionContext {
 public:
  BlockExecution(Chain& chain, const Transaction& tx, std::uint64_t height, SimTime time)
      : chain_(chain), tx_(tx), height_(height), time_(time) {}

  const Transaction& tx() const override { return tx_; }
  std::uint64_t block_height() const override { return height_; }
  SimTime block_time() const override { return time_; }
  Amount balance(const Address& who) const override { return chain_.balance(who); }

  void transfer(const Address& from, const Address& to, Amount amount) override {
    if (amount < 0) throw Error(ErrorCode::InvalidParams, "negative transfer");
    if (amount == 0) return;
    chain_.debit(from, amount);
    chain_.credit(to, amount);
    journal_.push_back({from, to, amount});
  }

  void emit(std::string kind, const Address& contract) override {
    events_.push_back({std::move(kind), contract});
  }

  void revert() {
    for (auto it = journal_.rbegin(); it != journal_.rend(); ++it) {
      chain_.debit(it->to, it->amount);
      chain_.credit(it->from, it->amount);
    }
    journal_.clear();
    events_.clear();
  }

  std::vector<std::pair<std::string, Address>>& events() { return events_; }

 private:
  struct Move {
    Address from, to;
    Amount amount;
  };

  Chain& chain_;
  const Transaction& tx_;
  std::uint64_t height_;
  SimTime time_;
  std::vector<Move> journal_;
  std::vector<std::pair<std::string, Address>> events_;
};

Chain::Chain(ChainConfig config, ContractHost* host, Address miner,
             const std::map<Address, Amount>& genesis_allocations)
    : config_(std::move(config)), host_(host), miner_(miner), rng_(config_.rng_seed) {
  config_.validate();
  for (const auto& [addr, amount] : genesis_allocations) {
    if (amount < 0) throw Error(ErrorCode::InvalidParams, "negative genesis allocation");
    accounts_[addr] = Account{addr, amount, 0};
  }
  if (!accounts_.count(miner_)) accounts_[miner_] = Account{miner_, 0, 0};
  Block genesis;
  genesis.header.height = 0;
  genesis.header.tx_root = merkle::empty_root();
  genesis.header.timestamp_ms = 0;
  store_.append(std::move(genesis));
}

Amount Chain::balance(const Address& a) const {
  auto it = accounts_.find(a);
  return it == accounts_.end() ? 0 : it->second.balance;
}

Amount Chain::total_supply() const {
  Amount sum = 0;
  for (const auto& [addr, acc] : accounts_) sum += acc.balance;
  return sum;
}

void Chain::credit(const Address& to, Amount amount) {
  auto it = accounts_.find(to);
  if (it == accounts_.end()) it = accounts_.emplace(to, Account{to, 0, 0}).first;
  it->second.balance += amount;
}

void Chain::debit(const Address& from, Amount amount) {
  auto it = accounts_.find(from);
  if (it == accounts_.end() || it->second.balance < amount)
    throw Error(ErrorCode::InsufficientBalance, from.hex() + " cannot cover " + std::to_string(amount));
  it->second.balance -= amount;
}

std::uint64_t Chain::next_nonce(const Address& sender) const {
  auto acc = accounts_.find(sender);
  std::uint64_t n = acc == accounts_.end() ? 0 : acc->second.nonce;
  auto p = pending_count_.find(sender);
  return n + (p == pending_count_.end() ? 0 : p->second);
}

Hash256 Chain::submit_tx(Transaction tx) {
  auto acc = accounts_.find(tx.sender);
  if (acc == accounts_.end()) throw Error(ErrorCode::UnknownSender, tx.sender.hex());
  if (tx.value < 0 || tx.gas_limit < 0) throw Error(ErrorCode::InvalidParams, "negative value or gas limit");
  if (tx.nonce != next_nonce(tx.sender))
    throw Error(ErrorCode::InvalidParams, "nonce " + std::to_string(tx.nonce) + " where " +
                                              std::to_string(next_nonce(tx.sender)) + " expected");
  const Amount need = tx.value + tx.gas_limit * config_.gas_price;
  const Amount available = acc->second.balance - reserved_[tx.sender];
  if (available < need)
    throw Error(ErrorCode::InsufficientBalance,
                "balance " + std::to_string(available) + " below value plus max fee " + std::to_string(need));
  tx.gas_used = 0;
  tx.fee = 0;
  tx.success = false;
  const Hash256 h = tx.hash();
  reserved_[tx.sender] += need;
  ++pending_count_[tx.sender];
  pending_hashes_[h] = true;
  mempool_.push_back(Pending{std::move(tx), h, need});
  return h;
}

SimTime Chain::sample_block_interval() {
  // Inverse-CDF from 53 uniform bits keeps the draw identical across standard libraries.
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  const double seconds = -std::log1p(-u) * config_.mean_block_interval_s;
  return std::max<SimTime>(1, static_cast<SimTime>(std::llround(seconds * 1000.0)));
}

const Block& Chain::mine_next_block(SimTime now) {
  if (now < tip_time()) throw Error(ErrorCode::InvalidParams, "block time moves backwards");
  Block block;
  block.header.height = store_.tip_height() + 1;
  block.header.parent_hash = store_.tip_hash();
  block.header.timestamp_ms = now;

  std::size_t taken = 0;
  while (!mempool_.empty() && taken < config_.block_tx_limit) {
    Pending p = std::move(mempool_.front());
    mempool_.pop_front();
    ++taken;
    reserved_[p.tx.sender] -= p.reserved;
    --pending_count_[p.tx.sender];
    pending_hashes_.erase(p.hash);

    Transaction& tx = p.tx;
    Account& sender = accounts_.at(tx.sender);
    const Amount max_fee = tx.gas_limit * config_.gas_price;
    if (tx.nonce != sender.nonce || sender.balance < tx.value + max_fee) continue;
    ++sender.nonce;

    const auto tx_index = static_cast<std::uint32_t>(block.transactions.size());
    BlockExecution exec(*this, tx, block.header.height, now);
    std::int64_t gas = 0;
    bool ok = true;
    if (host_ && host_->is_contract(tx.recipient)) {
      exec.transfer(tx.sender, tx.recipient, tx.value);
      try {
        ExecResult r = host_->execute(exec);
        gas = r.gas_used;
        ok = r.success;
      } catch (const Error&) {
        gas = config_.gas.base_tx_cost;
        ok = false;
      }
    } else {
      gas = gas_meter(config_.gas, PayloadKind::Transfer, tx.payload.size());
      exec.transfer(tx.sender, tx.recipient, tx.value);
    }
    if (gas > tx.gas_limit) {
      gas = tx.gas_limit;
      ok = false;
    }
    if (!ok) exec.revert();

    tx.gas_used = gas;
    tx.fee = gas * config_.gas_price;
    tx.success = ok;
    debit(tx.sender, tx.fee);
    credit(miner_, tx.fee);
    for (auto& [kind, contract] : exec.events())
      block.events.push_back(Event{std::move(kind), contract, block.header.height, tx_index});
    block.transactions.push_back(std::move(tx));
  }

  block.header.tx_root = compute_tx_root(block.transactions);
  store_.append(std::move(block));
  return store_.blocks().back();
}

std::uint64_t Chain::confirmations(const Hash256& tx_hash) const {
  if (auto loc = store_.find(tx_hash)) return store_.tip_height() - loc->height;
  if (pending_hashes_.count(tx_hash)) return 0;
  throw Error(ErrorCode::UnknownTx, to_hex(tx_hash));
}

std::pair<std::uint64_t, merkle::InclusionProof> Chain::get_inclusion_proof(const Hash256& tx_hash) const {
  if (!store_.find(tx_hash) && pending_hashes_.count(tx_hash))
    throw Error(ErrorCode::Unmined, to_hex(tx_hash));
  return store_.inclusion_proof(tx_hash);
}

}  // namespace blockpki::ledger
