#include "blockpki/ledger/config.hpp"

#include "blockpki/error.hpp"

namespace blockpki::ledger {

std::int64_t gas_meter(const GasSchedule& schedule, PayloadKind kind, std::size_t stored_bytes) {
  std::int64_t gas = schedule.base_tx_cost +
                     schedule.per_byte_storage * static_cast<std::int64_t>(stored_bytes);
  if (kind == PayloadKind::ContractCreation) gas += schedule.per_contract_creation;
  return gas;
}

void ChainConfig::validate() const {
  if (!(mean_block_interval_s > 0)) throw Error(ErrorCode::InvalidParams, "mean_block_interval must be > 0");
  if (confirmation_depth < 0) throw Error(ErrorCode::InvalidParams, "confirmation_depth must be >= 0");
  if (gas_price < 0) throw Error(ErrorCode::InvalidParams, "gas_price must be >= 0");
  if (block_tx_limit == 0) throw Error(ErrorCode::InvalidParams, "block_tx_limit must be >= 1");
  if (gas.base_tx_cost < 0 || gas.per_byte_storage < 0 || gas.per_contract_creation < 0 ||
      gas.per_event < 0 || gas.per_signature_check < 0)
    throw Error(ErrorCode::InvalidParams, "gas costs must be non-negative");
}

Json to_json(const ChainConfig& c) {
  return Json{
      {"mean_block_interval", c.mean_block_interval_s},
      {"gas_price", c.gas_price},
      {"confirmation_depth", c.confirmation_depth},
      {"rng_seed", c.rng_seed},
      {"block_tx_limit", c.block_tx_limit},
      {"gas",
       {{"base_tx_cost", c.gas.base_tx_cost},
        {"per_byte_storage", c.gas.per_byte_storage},
        {"per_contract_creation", c.gas.per_contract_creation},
        {"per_event", c.gas.per_event},
        {"per_signature_check", c.gas.per_signature_check}}},
  };
}

namespace {

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("chain config field '") + key + "': " + ex.what());
  }
}

}  // namespace

ChainConfig chain_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "chain config must be an object");
  ChainConfig c;
  read_opt(j, "mean_block_interval", c.mean_block_interval_s);
  read_opt(j, "gas_price", c.gas_price);
  read_opt(j, "confirmation_depth", c.confirmation_depth);
  read_opt(j, "rng_seed", c.rng_seed);
  read_opt(j, "block_tx_limit", c.block_tx_limit);
  if (j.contains("gas")) {
    const Json& g = j.at("gas");
    if (!g.is_object()) throw Error(ErrorCode::ParseError, "chain config 'gas' must be an object");
    read_opt(g, "base_tx_cost", c.gas.base_tx_cost);
    read_opt(g, "per_byte_storage", c.gas.per_byte_storage);
    read_opt(g, "per_contract_creation", c.gas.per_contract_creation);
    read_opt(g, "per_event", c.gas.per_event);
    read_opt(g, "per_signature_check", c.gas.per_signature_check);
  }
  c.validate();
  return c;
}

}  // namespace blockpki::ledger
