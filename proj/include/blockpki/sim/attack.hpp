#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blockpki/sim/simulation.hpp"

namespace blockpki::sim {

struct Anomaly {
  std::size_t record_index = 0;
  std::string subject;
  Address sender;
  Hash256 tx_hash{};
  std::string reason;
};

// Flags every stored certificate for a registered domain that was not
// published by the registered owner, or that carries a different key.
std::vector<Anomaly> monitor_scan(const contracts::Runtime& runtime, const std::map<std::string, Address>& owners,
                                  const std::map<std::string, crypto::GroupElement>& keys = {});

struct TierOutcome {
  certs::ClientMode mode = certs::ClientMode::Unaware;
  bool accepted = false;
  std::optional<certs::RejectReason> reason;
};

struct AttackCase {
  std::size_t i = 0;
  std::size_t j = 0;
  bool logged = true;
  bool constructible = false;
  std::string failure;
  std::vector<TierOutcome> tiers;
  std::size_t anomalies = 0;

  bool accepted_by(certs::ClientMode m) const;
};

struct AttackReport {
  std::size_t threshold = 0;
  std::vector<AttackCase> cases;
};

Json to_json(const AttackCase& c);
Json to_json(const AttackReport& r);

// An honest issuance by the owner followed by the adversary's attempt against
// the same domain. The adversary names its compromised CAs first, then the
// impersonated ones, then honest CAs until T are listed.
AttackCase run_attack(const Scenario& base, const validation::AdversaryConfig& adversary, bool logged,
                      std::uint64_t seed);

// Every (i, j) with i + j <= max_sum over CA1..CAn, once logged and once unlogged.
AttackReport run_attack_grid(const Scenario& base, std::size_t max_sum, std::uint64_t seed);

}  // namespace blockpki::sim
