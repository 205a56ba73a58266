#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "blockpki/certificates/certificate.hpp"
#include "blockpki/contracts/runtime.hpp"
#include "blockpki/ledger/chain.hpp"
#include "blockpki/sim/scenario.hpp"
#include "blockpki/validation.hpp"

namespace blockpki::sim {

enum class RequesterState { CreatedContract, Renewing, AwaitingNonces, AwaitingSigs, Publishing, AwaitingConfirmations, Done, Failed };
std::string to_string(RequesterState s);

struct TxRecord {
  std::string kind;
  std::string sender;
  Hash256 hash{};
  std::uint64_t height = 0;
  std::int64_t gas_used = 0;
  Amount fee = 0;
  bool success = false;
};

struct IssuanceMetrics {
  std::size_t threshold = 0;
  std::uint64_t start_height = 0;
  std::uint64_t end_height = 0;
  std::uint64_t blocks_elapsed = 0;
  double sim_seconds = 0;
  std::size_t tx_count = 0;
  std::int64_t total_gas = 0;
  Amount total_fees = 0;
  // Gas of the transaction that opened the round: contract creation, or the
  // renewal funding transfer.
  std::int64_t setup_gas = 0;
  std::vector<TxRecord> per_tx;
  std::vector<std::string> misbehaving_cas;
  std::uint64_t nonces_gathered_height = 0;
};

struct IssuanceRequest {
  std::string requester;  // "owner" or validation::kAdversaryId
  std::string domain;
  std::vector<std::string> ca_ids;
  std::optional<std::size_t> first_t_threshold;
  Amount compensation = 0;
  // An adversary may keep the certificate off the storage contract.
  bool log_certificate = true;
};

struct IssuanceResult {
  bool success = false;
  std::string failure;
  std::vector<std::string> blocking_cas;
  Address contract;
  std::optional<certs::CertificatePayload> payload;
  std::optional<certs::BlockPkiCertificate> certificate;
  IssuanceMetrics metrics;
  RequesterState final_state = RequesterState::Failed;
};

struct Participant {
  std::string id;
  Address address;
};

class Simulation {
 public:
  Simulation(Scenario scenario, std::uint64_t seed);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const Scenario& scenario() const { return scenario_; }
  const crypto::GroupParams& params() const { return params_; }
  ledger::Chain& chain() { return *chain_; }
  const ledger::Chain& chain() const { return *chain_; }
  contracts::Runtime& runtime() { return *runtime_; }
  const contracts::Runtime& runtime() const { return *runtime_; }
  validation::ValidationWorld& world() { return world_; }
  const certs::CaDirectory& directory() const { return directory_; }
  SimTime now() const { return now_; }

  const Participant& owner() const { return owner_; }
  const Participant& adversary() const { return adversary_; }
  const crypto::KeyPair& ca_key(const std::string& id) const;
  // Trusted CA entries with proofs of possession, in CA order.
  std::vector<certs::TrustedCa> trusted_cas() const;
  // Domain name -> registered owner address, for the monitor.
  std::map<std::string, Address> owner_registry() const;
  crypto::GroupElement domain_key(const std::string& domain) const;

  // The default request for the scenario: owner, first `authorized` CAs.
  IssuanceRequest default_request() const;

  // Runs the event loop until the issuance completes or fails. Throws on
  // environment errors such as an unfunded requester (InsufficientBalance).
  IssuanceResult issue(const IssuanceRequest& request);
  // Funds a new round on a completed contract and runs it to completion.
  IssuanceResult renew(const Address& contract, const std::string& requester);

  // Mines n more blocks, processing pending actions.
  void advance_blocks(std::uint64_t n);

  class CaAgent;
  class RequesterAgent;

 private:
  friend class CaAgent;
  friend class RequesterAgent;

  // Queues a transaction to reach the mempool after a network delay. The
  // account nonce is assigned on arrival.
  void send(const Participant& from, const Address& to, Amount value, std::string payload, std::string kind,
            std::uint64_t tag, std::function<void(const Hash256&)> on_hash = {});
  void at(SimTime when, std::function<void()> action);
  SimTime propagation_delay();
  SimTime validation_delay();
  SimTime exponential_ms(double mean_s);
  void respond_to_challenge(const Address& contract_requester, const validation::Challenge& ch);
  void step();
  IssuanceResult run(RequesterAgent& agent);
  IssuanceMetrics collect_metrics(std::uint64_t tag, std::uint64_t start_height, SimTime start_time) const;

  Scenario scenario_;
  crypto::GroupParams params_;
  std::unique_ptr<contracts::Runtime> runtime_;
  std::unique_ptr<ledger::Chain> chain_;
  validation::ValidationWorld world_;
  certs::CaDirectory directory_;
  Participant owner_;
  Participant adversary_;
  std::vector<std::unique_ptr<CaAgent>> cas_;
  std::map<std::string, crypto::GroupElement> domain_keys_;
  std::mt19937_64 rng_;

  SimTime now_ = 0;
  SimTime next_block_ = 0;
  std::uint64_t seq_ = 0;
  std::multimap<std::pair<SimTime, std::uint64_t>, std::function<void()>> queue_;
  std::vector<RequesterAgent*> active_;
  std::uint64_t next_tag_ = 1;
  // Issuance tag of the round a domain contract is currently running.
  std::map<Address, std::uint64_t> contract_tag_;
  struct SentTx {
    Hash256 hash;
    std::string kind;
    std::string sender;
  };
  std::map<std::uint64_t, std::vector<SentTx>> sent_;
};

}  // namespace blockpki::sim
