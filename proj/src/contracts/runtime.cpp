#include "blockpki/contracts/runtime.hpp"

#include <algorithm>

#include "blockpki/error.hpp"
#include "blockpki/hash.hpp"

namespace blockpki::contracts {

using ledger::ExecResult;
using ledger::ExecutionContext;
using ledger::PayloadKind;

bool DomainContractState::is_authorized(const Address& ca) const {
  return std::find(authorized_cas.begin(), authorized_cas.end(), ca) != authorized_cas.end();
}

std::optional<crypto::GroupElement> DomainContractState::nonce_of(const Address& ca) const {
  for (const auto& [who, n] : cert_pub_nonces)
    if (who == ca) return n;
  return std::nullopt;
}

std::optional<crypto::Scalar> DomainContractState::signature_of(const Address& ca) const {
  for (const auto& [who, s] : cert_sigs)
    if (who == ca) return s;
  return std::nullopt;
}

Amount DomainContractState::total_compensation() const {
  if (!first_t_mode) {
    Amount sum = 0;
    for (const auto& [ca, c] : compensations) sum += c;
    return sum;
  }
  // Only T CAs can be paid; the requester funds the T most expensive ones.
  std::vector<Amount> c;
  for (const auto& [ca, amount] : compensations) c.push_back(amount);
  std::sort(c.rbegin(), c.rend());
  Amount sum = 0;
  for (std::size_t i = 0; i < threshold && i < c.size(); ++i) sum += c[i];
  return sum;
}

Amount DomainContractState::unpaid_compensation() const {
  if (all_cert_sigs || cancelled) return 0;
  if (all_cert_nonces) {
    Amount sum = 0;
    for (const auto& [ca, n] : cert_pub_nonces)
      if (!paid.count(ca)) sum += compensations.at(ca);
    return sum;
  }
  return total_compensation();
}

// ---- payload builders ----

namespace {

std::string call(const char* method, Json args) {
  return canonical_dump(Json{{"method", method}, {"args", std::move(args)}});
}

Json create_args_json(const CreateArgs& a) {
  Json cas = Json::array();
  for (const auto& ca : a.authorized_cas) cas.push_back(ca.hex());
  Json j{{"certData", certs::to_json(a.cert_data)}, {"authorizedCAs", cas}, {"compensations", a.compensations}};
  if (a.threshold) j["threshold"] = *a.threshold;
  return j;
}

}  // namespace

std::string call_create_domain_contract(const CreateArgs& args) {
  return call("createDomainContract", create_args_json(args));
}

std::string call_send_cert_pub_nonce(const crypto::GroupElement& nonce) {
  return call("sendCertPubNonce", Json{{"nonce", to_hex(nonce.encoding)}});
}

std::string call_send_cert_signature(const crypto::Group& group, const crypto::Scalar& s) {
  return call("sendCertSignature", Json{{"s", to_hex(group.encode_scalar(s))}});
}

std::string call_renew(std::int64_t not_before, std::int64_t not_after) {
  return call("renew", Json{{"notBefore", not_before}, {"notAfter", not_after}});
}

std::string call_store_certificate(const crypto::Group& group, const certs::CertificatePayload& payload) {
  return call("storeCertificate", certs::to_json(group, payload));
}

std::string call_withdraw_surplus() { return call("withdrawSurplus", Json::object()); }
std::string call_cancel() { return call("cancel", Json::object()); }

// ---- runtime ----

Runtime::Runtime(crypto::GroupParams params, ledger::GasSchedule gas, RuntimeConfig config)
    : params_(std::move(params)), gas_(gas), config_(config) {}

Address Runtime::central_address() { return Address::from_label("contract/central"); }
Address Runtime::storage_address() { return Address::from_label("contract/storage"); }

bool Runtime::is_contract(const Address& address) const {
  return address == central_address() || address == storage_address() || domains_.count(address) > 0;
}

const DomainContractState& Runtime::domain(const Address& address) const {
  auto it = domains_.find(address);
  if (it == domains_.end()) throw Error(ErrorCode::InvalidParams, "no domain contract at " + address.hex());
  return it->second;
}

namespace {

// Gas above the caller's limit: the chain turns this into an out-of-gas revert,
// so the contract must return before touching its state.
bool over_limit(const ExecutionContext& ctx, std::int64_t gas) { return gas > ctx.tx().gas_limit; }

}  // namespace

ExecResult Runtime::execute(ExecutionContext& ctx) {
  const Json call = parse_json(ctx.tx().payload, "contract call");
  if (!call.is_object() || !call.contains("method") || !call["method"].is_string())
    throw Error(ErrorCode::ParseError, "contract call needs a method");
  const std::string method = call["method"].get<std::string>();
  const Json args = call.value("args", Json::object());
  const Address& to = ctx.tx().recipient;

  if (to == central_address()) {
    if (method == "createDomainContract") return create_domain_contract(ctx, args);
  } else if (to == storage_address()) {
    if (method == "storeCertificate") return store_certificate(ctx, args);
  } else {
    DomainContractState& st = domains_.at(to);
    if (method == "sendCertPubNonce") return send_cert_pub_nonce(ctx, st, args);
    if (method == "sendCertSignature") return send_cert_signature(ctx, st, args);
    if (method == "renew") return renew(ctx, st, args);
    if (method == "withdrawSurplus") return withdraw_surplus(ctx, st);
    if (method == "cancel") return cancel(ctx, st);
  }
  throw Error(ErrorCode::InvalidParams, "unknown method " + method);
}

ExecResult Runtime::create_domain_contract(ExecutionContext& ctx, const Json& args) {
  const ExecResult refused{gas_.base_tx_cost, false};
  DomainContractState st;
  std::vector<Amount> comps;
  try {
    st.cert_data = certs::cert_data_from_json(args.at("certData"));
    for (const auto& a : args.at("authorizedCAs")) st.authorized_cas.push_back(Address::from_hex(a.get<std::string>()));
    comps = args.at("compensations").get<std::vector<Amount>>();
    if (args.contains("threshold")) {
      st.first_t_mode = true;
      st.threshold = args.at("threshold").get<std::size_t>();
    }
  } catch (const Json::exception&) {
    return refused;
  } catch (const Error&) {
    return refused;
  }

  try {
    st.cert_data.validate();
  } catch (const Error&) {
    return refused;
  }
  if (st.authorized_cas.empty() || comps.size() != st.authorized_cas.size()) return refused;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (comps[i] < 0) return refused;
    if (!st.compensations.emplace(st.authorized_cas[i], comps[i]).second) return refused;  // duplicate CA
  }
  if (st.first_t_mode) {
    if (st.threshold == 0 || st.threshold >= st.authorized_cas.size()) return refused;
  } else {
    st.threshold = st.authorized_cas.size();
  }
  const Amount funds = ctx.tx().value;
  if (funds < st.total_compensation()) return refused;

  const std::size_t stored = st.cert_data.stored_size() + st.authorized_cas.size() * (20 + 8) + (st.first_t_mode ? 8 : 0);
  const std::int64_t gas = ledger::gas_meter(gas_, PayloadKind::ContractCreation, stored) + gas_.per_event;
  if (over_limit(ctx, gas)) return {gas, false};

  Bytes seed = to_bytes("blockpki/domain-contract/v1");
  append(seed, central_address().raw());
  append_u64_be(seed, created_.size());
  const Hash256 digest = sha256(seed);
  std::array<std::uint8_t, 20> raw{};
  std::copy_n(digest.begin(), raw.size(), raw.begin());
  st.address = Address(raw);
  st.requester = ctx.tx().sender;
  st.created_height = ctx.block_height();
  st.round_start_height = ctx.block_height();

  // Escrow is the contract's own balance.
  ctx.transfer(central_address(), st.address, funds);
  ctx.emit(kNewDomainContract, st.address);
  created_.push_back(st.address);
  domains_.emplace(st.address, std::move(st));
  return {gas, true};
}

ExecResult Runtime::send_cert_pub_nonce(ExecutionContext& ctx, DomainContractState& st, const Json& args) {
  const ExecResult ignored{gas_.base_tx_cost, true};
  const Address& ca = ctx.tx().sender;
  if (st.cancelled || st.all_cert_nonces || !st.is_authorized(ca) || st.nonce_of(ca)) return ignored;
  crypto::GroupElement nonce;
  try {
    nonce = params_.g().decode_element(from_hex(args.at("nonce").get<std::string>()));
  } catch (const Json::exception&) {
    return ignored;
  } catch (const Error&) {
    return ignored;
  }
  const bool completes = st.cert_pub_nonces.size() + 1 == st.threshold;
  const std::int64_t gas = ledger::gas_meter(gas_, PayloadKind::ContractCall, params_.g().element_width()) +
                           (completes ? gas_.per_event : 0);
  if (over_limit(ctx, gas)) return {gas, false};

  st.cert_pub_nonces.emplace_back(ca, std::move(nonce));
  if (completes) {
    st.all_cert_nonces = true;
    st.nonces_gathered_height = ctx.block_height();
    ctx.emit(kAllCertNoncesGathered, st.address);
  }
  return {gas, true};
}

ExecResult Runtime::send_cert_signature(ExecutionContext& ctx, DomainContractState& st, const Json& args) {
  const ExecResult ignored{gas_.base_tx_cost, true};
  const Address& ca = ctx.tx().sender;
  if (st.cancelled || !st.all_cert_nonces || st.all_cert_sigs || !st.nonce_of(ca) || st.paid.count(ca))
    return ignored;
  crypto::Scalar s;
  try {
    s = params_.g().decode_scalar(from_hex(args.at("s").get<std::string>()));
  } catch (const Json::exception&) {
    return ignored;
  } catch (const Error&) {
    return ignored;
  }

  std::int64_t gas = ledger::gas_meter(gas_, PayloadKind::ContractCall, params_.g().scalar_width());
  if (config_.on_chain_sig_check) {
    gas += gas_.per_signature_check;
    if (!partial_check_ || !partial_check_(st, ca, s)) {
      const std::int64_t reject_gas = gas_.base_tx_cost + gas_.per_signature_check;
      if (over_limit(ctx, reject_gas)) return {reject_gas, false};
      return {reject_gas, true};
    }
  }
  const bool completes = st.cert_sigs.size() + 1 == st.threshold;
  if (completes) gas += gas_.per_event;
  if (over_limit(ctx, gas)) return {gas, false};

  st.cert_sigs.emplace_back(ca, std::move(s));
  st.paid.insert(ca);
  ctx.transfer(st.address, ca, st.compensations.at(ca));
  if (completes) {
    st.all_cert_sigs = true;
    ctx.emit(kAllCertSignaturesGathered, st.address);
  }
  return {gas, true};
}

ExecResult Runtime::renew(ExecutionContext& ctx, DomainContractState& st, const Json& args) {
  const ExecResult refused{gas_.base_tx_cost, false};
  if (ctx.tx().sender != st.requester || st.cancelled || !st.all_cert_sigs) return refused;
  certs::CertData next = st.cert_data;
  try {
    next.not_before = args.at("notBefore").get<std::int64_t>();
    next.not_after = args.at("notAfter").get<std::int64_t>();
    next.validate();
  } catch (const Json::exception&) {
    return refused;
  } catch (const Error&) {
    return refused;
  }
  // Funds attached to the renewal must cover a full round on their own.
  if (ctx.tx().value < st.total_compensation()) return refused;
  const std::int64_t gas = ledger::gas_meter(gas_, PayloadKind::ContractCall, 16);
  if (over_limit(ctx, gas)) return {gas, false};

  st.cert_data = std::move(next);
  ++st.round;
  st.round_start_height = ctx.block_height();
  st.cert_pub_nonces.clear();
  st.all_cert_nonces = false;
  st.nonces_gathered_height = 0;
  st.cert_sigs.clear();
  st.paid.clear();
  st.all_cert_sigs = false;
  return {gas, true};
}

ExecResult Runtime::withdraw_surplus(ExecutionContext& ctx, DomainContractState& st) {
  const std::int64_t gas = gas_.base_tx_cost;
  if (ctx.tx().sender != st.requester) return {gas, false};
  const Amount surplus = ctx.balance(st.address) - st.unpaid_compensation();
  if (over_limit(ctx, gas)) return {gas, false};
  if (surplus > 0) ctx.transfer(st.address, st.requester, surplus);
  return {gas, true};
}

ExecResult Runtime::cancel(ExecutionContext& ctx, DomainContractState& st) {
  const std::int64_t gas = gas_.base_tx_cost;
  if (ctx.tx().sender != st.requester || st.cancelled || st.all_cert_sigs) return {gas, false};
  if (ctx.block_height() < st.round_start_height + config_.cancel_timeout_blocks) return {gas, false};
  if (over_limit(ctx, gas)) return {gas, false};
  st.cancelled = true;
  const Amount rest = ctx.balance(st.address);
  if (rest > 0) ctx.transfer(st.address, st.requester, rest);
  return {gas, true};
}

ExecResult Runtime::store_certificate(ExecutionContext& ctx, const Json& args) {
  StoredCertificateRecord rec;
  try {
    rec.payload = certs::payload_from_json(params_.g(), args);
  } catch (const Error&) {
    return {gas_.base_tx_cost, false};
  }
  const std::int64_t gas = ledger::gas_meter(gas_, PayloadKind::ContractCall, certs::stored_size(params_.g(), rec.payload));
  if (over_limit(ctx, gas)) return {gas, false};
  rec.sender = ctx.tx().sender;
  rec.tx_hash = ctx.tx().hash();
  rec.block_height = ctx.block_height();
  rec.index = stored_.size();
  stored_.push_back(std::move(rec));
  return {gas, true};
}

std::vector<Event> scan_events(const ledger::BlockStore& store, std::uint64_t from, std::uint64_t to,
                               std::optional<std::string> kind) {
  std::vector<Event> out;
  if (store.blocks().empty()) return out;
  to = std::min(to, store.tip_height());
  for (std::uint64_t h = from; h <= to && h < store.blocks().size(); ++h)
    for (const auto& ev : store.at(h).events)
      if (!kind || ev.kind == *kind) out.push_back(ev);
  return out;
}

}  // namespace blockpki::contracts
