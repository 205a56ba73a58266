#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blockpki/certificates/certificate.hpp"
#include "blockpki/contracts/runtime.hpp"
#include "blockpki/ledger/config.hpp"
#include "blockpki/validation.hpp"

namespace blockpki::sim {

enum class CaBehavior { Honest, Compromised, Unresponsive, GarbageSigner };
std::string to_string(CaBehavior b);
CaBehavior ca_behavior_from_string(const std::string& s);  // throws ParseError

struct TimingConfig {
  // Zero network and validation delay and a fixed block interval equal to the mean.
  bool ideal = false;
  double propagation_mean_s = 4.0;
  double validation_mean_s = 2.0;
  // Challenge deadline in block intervals.
  double challenge_deadline_blocks = 2.0;
};

struct Scenario {
  ledger::ChainConfig chain;
  std::string group = "secp256k1";
  std::size_t threshold = 4;
  // CAs in existence; the first `authorized` of them are named in the request.
  std::size_t num_cas = 4;
  std::size_t authorized = 4;
  bool first_t_mode = false;
  std::vector<CaBehavior> behaviors;  // per CA, missing entries are honest
  Amount compensation = 1000;
  Amount requester_funds = 1'000'000'000'000;
  std::int64_t tx_gas_limit = 2'000'000;
  std::string domain = "www.example.com";
  std::int64_t validity_s = 90 * 24 * 3600;
  TimingConfig timing;
  contracts::RuntimeConfig runtime;
  std::uint64_t issuance_timeout_blocks = 20;
  std::optional<validation::AdversaryConfig> adversary;
  std::vector<certs::ClientMode> client_tiers = {certs::ClientMode::Unaware, certs::ClientMode::Light,
                                                 certs::ClientMode::Full};
  std::size_t repetitions = 1;
  std::uint64_t seed = 1;

  // Throws InvalidParams.
  void validate() const;
  CaBehavior behavior(std::size_t ca_index) const;
};

Json to_json(const Scenario& s);
// {"chain": {...}, "threshold", "num_cas", "authorized", "first_t_mode", "ca_behaviors": [...],
//  "compensation", "requester_funds", "timing": {...}, "adversary": {...}, "client_tiers": [...],
//  "repetitions", "seed", ...}; missing keys keep defaults.
Scenario scenario_from_json(const Json& j);

// Copy with threshold t. First-T mode keeps its number of spare authorized CAs;
// num_cas grows when needed.
Scenario with_threshold(Scenario s, std::size_t t);

std::string ca_id(std::size_t index);  // 0 -> "CA1"

}  // namespace blockpki::sim
