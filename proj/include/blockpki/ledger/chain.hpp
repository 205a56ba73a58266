#pragma once

#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "blockpki/ledger/config.hpp"
#include "blockpki/ledger/types.hpp"
#include "blockpki/merkle.hpp"

namespace blockpki::ledger {

// Operations a contract may perform while one transaction executes.
class ExecutionContext {
 public:
  virtual ~ExecutionContext() = default;

  virtual const Transaction& tx() const = 0;
  virtual std::uint64_t block_height() const = 0;
  virtual SimTime block_time() const = 0;
  virtual Amount balance(const Address& who) const = 0;
  // Throws InsufficientBalance if `from` cannot cover the amount.
  virtual void transfer(const Address& from, const Address& to, Amount amount) = 0;
  virtual void emit(std::string kind, const Address& contract) = 0;
};

struct ExecResult {
  std::int64_t gas_used = 0;
  // false: the call is reverted and the attached value returned to the sender.
  // A reverting contract must not have touched its own state.
  bool success = true;
};

class ContractHost {
 public:
  virtual ~ContractHost() = default;
  virtual bool is_contract(const Address& address) const = 0;
  virtual ExecResult execute(ExecutionContext& ctx) = 0;
};

struct TxLocation {
  std::uint64_t height = 0;
  std::size_t index = 0;
};

// Append-only block sequence with a transaction index. Shared by the live chain
// and by archives loaded from disk.
class BlockStore {
 public:
  BlockStore() = default;
  explicit BlockStore(std::vector<Block> blocks);  // validates linkage and roots

  void append(Block block);

  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& at(std::uint64_t height) const { return blocks_.at(height); }
  bool has_height(std::uint64_t height) const { return height < blocks_.size(); }
  std::uint64_t tip_height() const { return blocks_.size() - 1; }
  Hash256 tip_hash() const { return blocks_.back().header.hash(); }
  std::vector<BlockHeader> header_chain() const;

  std::optional<TxLocation> find(const Hash256& tx_hash) const;
  // Throws UnknownTx.
  std::pair<std::uint64_t, merkle::InclusionProof> inclusion_proof(const Hash256& tx_hash) const;

  // One canonical JSON document per block, newline terminated.
  std::string dump_jsonl() const;
  // Throws ParseError naming the offending line, or ChainIntegrity when a
  // header does not link to its parent or its tx_root does not match.
  static BlockStore load_jsonl(const std::string& text);

 private:
  void index_block(const Block& block);

  std::vector<Block> blocks_;
  std::map<Hash256, TxLocation> tx_index_;
};

// True iff each header's parent_hash is the hash of the previous header.
bool headers_linked(const std::vector<BlockHeader>& headers);

// Simulated ledger: accounts, FIFO mempool, fee charging, block production.
// Owned and driven by a single thread.
class Chain {
 public:
  Chain(ChainConfig config, ContractHost* host, Address miner,
        const std::map<Address, Amount>& genesis_allocations);

  const ChainConfig& config() const { return config_; }
  const Address& miner() const { return miner_; }

  // Throws UnknownSender or InsufficientBalance (balance must cover value and
  // the maximum fee of this and every pending transaction of the sender).
  Hash256 submit_tx(Transaction tx);
  // Account nonce plus pending transactions; the nonce a new tx should carry.
  std::uint64_t next_nonce(const Address& sender) const;
  std::size_t mempool_size() const { return mempool_.size(); }

  // Exponential inter-block gap with the configured mean, from the chain RNG.
  SimTime sample_block_interval();

  const Block& mine_next_block(SimTime now);

  // tip - containing height; 0 while pending. Throws UnknownTx.
  std::uint64_t confirmations(const Hash256& tx_hash) const;
  std::vector<BlockHeader> header_chain() const { return store_.header_chain(); }
  // Throws Unmined for pending transactions and UnknownTx otherwise.
  std::pair<std::uint64_t, merkle::InclusionProof> get_inclusion_proof(const Hash256& tx_hash) const;

  const BlockStore& store() const { return store_; }
  std::uint64_t tip_height() const { return store_.tip_height(); }
  Hash256 tip_hash() const { return store_.tip_hash(); }
  SimTime tip_time() const { return store_.blocks().back().header.timestamp_ms; }

  bool has_account(const Address& a) const { return accounts_.count(a) > 0; }
  Amount balance(const Address& a) const;
  // Sum of all balances, contracts and miner included.
  Amount total_supply() const;
  const std::map<Address, Account>& accounts() const { return accounts_; }

 private:
  class BlockExecution;

  struct Pending {
    Transaction tx;
    Hash256 hash;
    Amount reserved;
  };

  void credit(const Address& to, Amount amount);
  void debit(const Address& from, Amount amount);

  ChainConfig config_;
  ContractHost* host_;
  Address miner_;
  std::map<Address, Account> accounts_;
  std::deque<Pending> mempool_;
  std::map<Address, Amount> reserved_;
  std::map<Address, std::uint64_t> pending_count_;
  std::map<Hash256, bool> pending_hashes_;
  BlockStore store_;
  std::mt19937_64 rng_;
};

}  // namespace blockpki::ledger
