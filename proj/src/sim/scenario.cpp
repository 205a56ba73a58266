#include "blockpki/sim/scenario.hpp"

#include <algorithm>

#include "blockpki/error.hpp"

namespace blockpki::sim {

std::string to_string(CaBehavior b) {
  switch (b) {
    case CaBehavior::Honest: return "honest";
    case CaBehavior::Compromised: return "compromised";
    case CaBehavior::Unresponsive: return "unresponsive";
    case CaBehavior::GarbageSigner: return "garbage_signer";
  }
  return "?";
}

CaBehavior ca_behavior_from_string(const std::string& s) {
  if (s == "honest") return CaBehavior::Honest;
  if (s == "compromised") return CaBehavior::Compromised;
  if (s == "unresponsive") return CaBehavior::Unresponsive;
  if (s == "garbage_signer") return CaBehavior::GarbageSigner;
  throw Error(ErrorCode::ParseError, "unknown CA behavior '" + s + "'");
}

std::string ca_id(std::size_t index) { return "CA" + std::to_string(index + 1); }

CaBehavior Scenario::behavior(std::size_t ca_index) const {
  return ca_index < behaviors.size() ? behaviors[ca_index] : CaBehavior::Honest;
}

void Scenario::validate() const {
  chain.validate();
  if (group != "tiny" && group != "secp256k1") throw Error(ErrorCode::InvalidParams, "unknown group " + group);
  if (threshold == 0) throw Error(ErrorCode::InvalidParams, "threshold must be >= 1");
  if (authorized > num_cas) throw Error(ErrorCode::InvalidParams, "more authorized CAs than exist");
  if (first_t_mode ? authorized <= threshold : authorized != threshold)
    throw Error(ErrorCode::InvalidParams,
                first_t_mode ? "first-T mode needs more authorized CAs than T" : "authorized CAs must equal T");
  if (compensation < 0 || requester_funds < 0) throw Error(ErrorCode::InvalidParams, "negative amount");
  if (tx_gas_limit <= 0) throw Error(ErrorCode::InvalidParams, "tx_gas_limit must be positive");
  if (domain.empty()) throw Error(ErrorCode::InvalidParams, "empty domain");
  if (validity_s <= 0) throw Error(ErrorCode::InvalidParams, "validity must be positive");
  if (timing.propagation_mean_s < 0 || timing.validation_mean_s < 0 || timing.challenge_deadline_blocks <= 0)
    throw Error(ErrorCode::InvalidParams, "bad timing parameters");
  if (repetitions == 0) throw Error(ErrorCode::InvalidParams, "repetitions must be >= 1");
  if (adversary) adversary->validate();
}

Scenario with_threshold(Scenario s, std::size_t t) {
  const std::size_t extra = s.first_t_mode && s.authorized > s.threshold ? s.authorized - s.threshold : 0;
  s.threshold = t;
  s.authorized = t + (s.first_t_mode ? std::max<std::size_t>(extra, 1) : 0);
  s.num_cas = std::max(s.num_cas, s.authorized);
  return s;
}

Json to_json(const Scenario& s) {
  Json behaviors = Json::array();
  for (auto b : s.behaviors) behaviors.push_back(to_string(b));
  Json tiers = Json::array();
  for (auto t : s.client_tiers) tiers.push_back(certs::to_string(t));
  Json j{
      {"chain", ledger::to_json(s.chain)},
      {"group", s.group},
      {"threshold", s.threshold},
      {"num_cas", s.num_cas},
      {"authorized", s.authorized},
      {"first_t_mode", s.first_t_mode},
      {"ca_behaviors", behaviors},
      {"compensation", s.compensation},
      {"requester_funds", s.requester_funds},
      {"tx_gas_limit", s.tx_gas_limit},
      {"domain", s.domain},
      {"validity_s", s.validity_s},
      {"timing",
       {{"ideal", s.timing.ideal},
        {"propagation_mean_s", s.timing.propagation_mean_s},
        {"validation_mean_s", s.timing.validation_mean_s},
        {"challenge_deadline_blocks", s.timing.challenge_deadline_blocks}}},
      {"on_chain_sig_check", s.runtime.on_chain_sig_check},
      {"cancel_timeout_blocks", s.runtime.cancel_timeout_blocks},
      {"issuance_timeout_blocks", s.issuance_timeout_blocks},
      {"client_tiers", tiers},
      {"repetitions", s.repetitions},
      {"seed", s.seed},
  };
  if (s.adversary) j["adversary"] = validation::to_json(*s.adversary);
  return j;
}

namespace {

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "scenario must be an object");
  Scenario s;
  try {
    if (j.contains("chain")) s.chain = ledger::chain_config_from_json(j.at("chain"));
    read_opt(j, "group", s.group);
    read_opt(j, "threshold", s.threshold);
    // T alone implies a default-mode request over exactly T CAs.
    s.num_cas = s.authorized = s.threshold;
    read_opt(j, "authorized", s.authorized);
    s.num_cas = s.authorized;
    read_opt(j, "num_cas", s.num_cas);
    read_opt(j, "first_t_mode", s.first_t_mode);
    if (j.contains("ca_behaviors"))
      for (const auto& b : j.at("ca_behaviors")) s.behaviors.push_back(ca_behavior_from_string(b.get<std::string>()));
    read_opt(j, "compensation", s.compensation);
    read_opt(j, "requester_funds", s.requester_funds);
    read_opt(j, "tx_gas_limit", s.tx_gas_limit);
    read_opt(j, "domain", s.domain);
    read_opt(j, "validity_s", s.validity_s);
    if (j.contains("timing")) {
      const Json& t = j.at("timing");
      read_opt(t, "ideal", s.timing.ideal);
      read_opt(t, "propagation_mean_s", s.timing.propagation_mean_s);
      read_opt(t, "validation_mean_s", s.timing.validation_mean_s);
      read_opt(t, "challenge_deadline_blocks", s.timing.challenge_deadline_blocks);
    }
    read_opt(j, "on_chain_sig_check", s.runtime.on_chain_sig_check);
    read_opt(j, "cancel_timeout_blocks", s.runtime.cancel_timeout_blocks);
    read_opt(j, "issuance_timeout_blocks", s.issuance_timeout_blocks);
    if (j.contains("adversary") && !j.at("adversary").is_null())
      s.adversary = validation::adversary_from_json(j.at("adversary"));
    if (j.contains("client_tiers")) {
      s.client_tiers.clear();
      for (const auto& t : j.at("client_tiers")) s.client_tiers.push_back(certs::client_mode_from_string(t.get<std::string>()));
    }
    read_opt(j, "repetitions", s.repetitions);
    read_opt(j, "seed", s.seed);
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("scenario: ") + ex.what());
  }
  s.validate();
  return s;
}

}  // namespace blockpki::sim
