#pragma once

#include <cstdint>

#include "blockpki/common.hpp"
#include "blockpki/json_util.hpp"

namespace blockpki::ledger {

// Ethereum-flavoured constants. Only the linear shape and the relative ranking
// of transaction costs matter; the absolute numbers are arbitrary.
struct GasSchedule {
  std::int64_t base_tx_cost = 21000;
  std::int64_t per_byte_storage = 640;
  std::int64_t per_contract_creation = 32000;
  std::int64_t per_event = 375;
  std::int64_t per_signature_check = 3000;

  friend bool operator==(const GasSchedule&, const GasSchedule&) = default;
};

enum class PayloadKind { Transfer, ContractCall, ContractCreation };

// Static part of a transaction's gas: base cost, stored bytes and, for
// creations, the creation surcharge. Events and signature checks are added by
// the contract runtime as they happen.
std::int64_t gas_meter(const GasSchedule& schedule, PayloadKind kind, std::size_t stored_bytes);

struct ChainConfig {
  double mean_block_interval_s = 15.0;
  Amount gas_price = 1;
  int confirmation_depth = 12;
  std::uint64_t rng_seed = 1;
  std::size_t block_tx_limit = 100;
  GasSchedule gas;

  // Throws InvalidParams when an invariant does not hold.
  void validate() const;

  friend bool operator==(const ChainConfig&, const ChainConfig&) = default;
};

Json to_json(const ChainConfig& c);
// Missing keys keep their defaults.
ChainConfig chain_config_from_json(const Json& j);

}  // namespace blockpki::ledger
