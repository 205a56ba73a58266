#include "blockpki/sim/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "blockpki/error.hpp"
#include "blockpki/hash.hpp"

namespace blockpki::sim {

using certs::CaIdentity;
using contracts::DomainContractState;
using contracts::Runtime;

std::string to_string(RequesterState s) {
  switch (s) {
    case RequesterState::CreatedContract: return "created_contract";
    case RequesterState::Renewing: return "renewing";
    case RequesterState::AwaitingNonces: return "awaiting_nonces";
    case RequesterState::AwaitingSigs: return "awaiting_sigs";
    case RequesterState::Publishing: return "publishing";
    case RequesterState::AwaitingConfirmations: return "awaiting_confirmations";
    case RequesterState::Done: return "done";
    case RequesterState::Failed: return "failed";
  }
  return "?";
}

namespace {

constexpr Amount kCaFunds = 1'000'000'000'000;

std::string call_method(const std::string& payload) {
  try {
    return Json::parse(payload).at("method").get<std::string>();
  } catch (const std::exception&) {
    return {};
  }
}

std::optional<validation::AdversaryConfig> world_adversary(const Scenario& s) {
  std::optional<validation::AdversaryConfig> adv = s.adversary;
  for (std::size_t i = 0; i < s.num_cas; ++i) {
    if (s.behavior(i) != CaBehavior::Compromised) continue;
    if (!adv) {
      adv.emplace();
      adv->target_domain = s.domain;
    }
    adv->compromised_cas.insert(ca_id(i));
  }
  return adv;
}

SimTime deadline_ms(const Scenario& s) {
  return static_cast<SimTime>(std::llround(s.timing.challenge_deadline_blocks * s.chain.mean_block_interval_s * 1000.0));
}

}  // namespace

// ---- CA agent ----

class Simulation::CaAgent {
 public:
  CaAgent(Simulation& sim, std::size_t index, CaBehavior behavior)
      : sim_(sim), behavior_(behavior) {
    self_.id = ca_id(index);
    self_.address = Address::from_label("ca/" + self_.id);
    key_ = crypto::keygen(sim.params_, to_bytes("blockpki/sim/ca-key/" + self_.id));
  }

  const Participant& self() const { return self_; }
  const crypto::KeyPair& key() const { return key_; }

  void on_block(const ledger::Block& block) {
    const Runtime& rt = *sim_.runtime_;
    for (const auto& ev : block.events) {
      if (ev.kind == contracts::kNewDomainContract) consider(ev.contract);
      if (ev.kind == contracts::kAllCertNoncesGathered) sign(ev.contract);
    }
    for (const auto& tx : block.transactions)
      if (tx.success && rt.is_contract(tx.recipient) && tx.recipient != Runtime::central_address() &&
          tx.recipient != Runtime::storage_address() && call_method(tx.payload) == "renew")
        consider(tx.recipient);
  }

 private:
  using RoundKey = std::pair<Address, std::uint64_t>;

  void consider(const Address& contract) {
    const DomainContractState& st = sim_.runtime_->domain(contract);
    if (!st.is_authorized(self_.address)) return;
    const RoundKey round{contract, st.round};
    if (!started_.insert(round).second) return;
    if (behavior_ == CaBehavior::Unresponsive) return;

    const validation::Challenge ch = sim_.world_.issue_challenge(self_.id, st.cert_data.subject_name, sim_.now_);
    sim_.respond_to_challenge(st.requester, ch);
    sim_.at(sim_.now_ + sim_.validation_delay(), [this, contract, round, ch] {
      const DomainContractState& cur = sim_.runtime_->domain(contract);
      if (cur.round != round.second || cur.all_cert_nonces || cur.cancelled) return;
      if (!sim_.world_.check_challenge(self_.id, ch, sim_.now_)) return;
      crypto::NoncePair nonce = crypto::gen_nonce(sim_.params_, key_, certs::nonce_derivation_message(cur));
      const crypto::GroupElement pub = nonce.public_nonce();
      nonces_.emplace(round, std::move(nonce));
      sim_.send(self_, contract, 0, contracts::call_send_cert_pub_nonce(pub), "sendCertPubNonce",
                sim_.contract_tag_[contract]);
    });
  }

  void sign(const Address& contract) {
    const DomainContractState& st = sim_.runtime_->domain(contract);
    auto it = nonces_.find({contract, st.round});
    if (it == nonces_.end() || it->second.consumed()) return;
    const certs::SigningContext ctx = certs::signing_context(sim_.params_, st, sim_.directory_);
    if (std::find(ctx.signers.begin(), ctx.signers.end(), self_.address) == ctx.signers.end()) return;

    crypto::Scalar s;
    if (behavior_ == CaBehavior::GarbageSigner) {
      it->second.take_secret();
      Bytes raw(sim_.params_.g().scalar_width());
      for (auto& b : raw) b = static_cast<std::uint8_t>(sim_.rng_());
      s = sim_.params_.g().reduce(crypto::bigint_from_bytes(raw));
    } else {
      s = crypto::partial_sign(sim_.params_, self_.id, key_, it->second, ctx.e).s;
    }
    sim_.send(self_, contract, 0, contracts::call_send_cert_signature(sim_.params_.g(), s), "sendCertSignature",
              sim_.contract_tag_[contract]);
  }

  Simulation& sim_;
  CaBehavior behavior_;
  Participant self_;
  crypto::KeyPair key_;
  std::set<RoundKey> started_;
  std::map<RoundKey, crypto::NoncePair> nonces_;
};

// ---- requester agent ----

class Simulation::RequesterAgent {
 public:
  RequesterAgent(Simulation& sim, Participant who, IssuanceRequest req, std::uint64_t tag)
      : sim_(sim), who_(std::move(who)), req_(std::move(req)), tag_(tag) {
    start_height_ = sim.chain_->tip_height();
    start_time_ = sim.now_;
  }

  void start_issuance() {
    state_ = RequesterState::CreatedContract;
    contracts::CreateArgs args;
    args.cert_data.subject_name = req_.domain;
    // An impersonator certifies a key of its own.
    args.cert_data.public_key =
        who_.address == sim_.owner_.address
            ? sim_.domain_key(req_.domain)
            : crypto::keygen(sim_.params_, to_bytes("blockpki/sim/impostor-key/" + req_.domain)).public_key;
    args.cert_data.not_before = sim_.now_ / 1000;
    args.cert_data.not_after = args.cert_data.not_before + sim_.scenario_.validity_s;
    for (const auto& id : req_.ca_ids) {
      args.authorized_cas.push_back(sim_.directory_.by_id(id).address);
      args.compensations.push_back(req_.compensation);
    }
    args.threshold = req_.first_t_threshold;
    const std::size_t paid = req_.first_t_threshold.value_or(req_.ca_ids.size());
    const Amount funds = req_.compensation * static_cast<Amount>(paid);
    sim_.send(who_, Runtime::central_address(), funds, contracts::call_create_domain_contract(args),
              "createDomainContract", tag_, [this](const Hash256& h) { setup_tx_ = h; });
  }

  void start_renewal(const Address& contract) {
    state_ = RequesterState::Renewing;
    contract_ = contract;
    sim_.contract_tag_[contract] = tag_;
    const DomainContractState& st = sim_.runtime_->domain(contract);
    const std::int64_t nb = sim_.now_ / 1000;
    sim_.send(who_, contract, st.total_compensation(), contracts::call_renew(nb, nb + sim_.scenario_.validity_s),
              "renew", tag_, [this](const Hash256& h) { setup_tx_ = h; });
  }

  bool finished() const { return state_ == RequesterState::Done || state_ == RequesterState::Failed; }

  void on_block(const ledger::Block&) {
    RequesterState before;
    do {
      before = state_;
      advance();
    } while (!finished() && state_ != before);
    check_timeout();
  }

  IssuanceResult result() const {
    IssuanceResult r;
    r.success = state_ == RequesterState::Done;
    r.final_state = state_;
    r.failure = failure_;
    r.blocking_cas = blocking_;
    r.contract = contract_;
    r.payload = payload_;
    r.certificate = cert_;
    r.metrics = sim_.collect_metrics(tag_, start_height_, start_time_);
    r.metrics.threshold = req_.first_t_threshold.value_or(req_.ca_ids.size());
    r.metrics.misbehaving_cas = misbehaving_;
    if (!contract_.is_zero()) r.metrics.nonces_gathered_height = sim_.runtime_->domain(contract_).nonces_gathered_height;
    return r;
  }

  std::uint64_t start_height() const { return start_height_; }

 private:
  const ledger::Transaction* mined(const std::optional<Hash256>& h, std::size_t* index = nullptr) const {
    if (!h) return nullptr;
    auto loc = sim_.chain_->store().find(*h);
    if (!loc) return nullptr;
    if (index) *index = loc->index;
    return &sim_.chain_->store().at(loc->height).transactions[loc->index];
  }

  void fail(std::string why) {
    failure_ = std::move(why);
    state_ = RequesterState::Failed;
  }

  void advance() {
    switch (state_) {
      case RequesterState::CreatedContract: {
        std::size_t index = 0;
        const ledger::Transaction* tx = mined(setup_tx_, &index);
        if (!tx) return;
        if (!tx->success) return fail("domain contract creation refused");
        const auto loc = sim_.chain_->store().find(*setup_tx_);
        for (const auto& ev : sim_.chain_->store().at(loc->height).events)
          if (ev.kind == contracts::kNewDomainContract && ev.tx_index == index) contract_ = ev.contract;
        sim_.contract_tag_[contract_] = tag_;
        state_ = RequesterState::AwaitingNonces;
        return;
      }
      case RequesterState::Renewing: {
        const ledger::Transaction* tx = mined(setup_tx_);
        if (!tx) return;
        if (!tx->success) return fail("renewal refused");
        state_ = RequesterState::AwaitingNonces;
        return;
      }
      case RequesterState::AwaitingNonces:
        if (sim_.runtime_->domain(contract_).all_cert_nonces) state_ = RequesterState::AwaitingSigs;
        return;
      case RequesterState::AwaitingSigs:
        if (sim_.runtime_->domain(contract_).all_cert_sigs) publish();
        return;
      case RequesterState::Publishing: {
        const ledger::Transaction* tx = mined(storage_tx_);
        if (!tx) return;
        if (!tx->success) return fail("storage transaction failed");
        state_ = RequesterState::AwaitingConfirmations;
        return;
      }
      case RequesterState::AwaitingConfirmations:
        if (sim_.chain_->confirmations(*storage_tx_) >= static_cast<std::uint64_t>(sim_.scenario_.chain.confirmation_depth)) {
          cert_ = certs::finalize_certificate(*sim_.chain_, *payload_, *storage_tx_);
          state_ = RequesterState::Done;
        }
        return;
      case RequesterState::Done:
      case RequesterState::Failed:
        return;
    }
  }

  void publish() {
    const DomainContractState& st = sim_.runtime_->domain(contract_);
    try {
      payload_ = certs::combine_from_contract(sim_.params_, st, sim_.directory_);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::AssemblyFailed) throw;
      const certs::SigningContext ctx = certs::signing_context(sim_.params_, st, sim_.directory_);
      for (std::size_t i = 0; i < ctx.signers.size(); ++i) {
        const CaIdentity& ca = sim_.directory_.by_address(ctx.signers[i]);
        const auto s = st.signature_of(ca.address);
        if (s && !crypto::verify_partial(sim_.params_, *s, ctx.e, ctx.nonces[i], ca.public_key))
          misbehaving_.push_back(ca.id);
      }
      return fail(err.what());
    }
    if (!req_.log_certificate) {
      cert_ = fabricate();
      state_ = RequesterState::Done;
      return;
    }
    state_ = RequesterState::Publishing;
    sim_.send(who_, Runtime::storage_address(), 0, contracts::call_store_certificate(sim_.params_.g(), *payload_),
              "storeCertificate", tag_, [this](const Hash256& h) { storage_tx_ = h; });
  }

  // A certificate whose storage transaction never reaches the chain.
  certs::BlockPkiCertificate fabricate() const {
    certs::BlockPkiCertificate c;
    c.payload = *payload_;
    c.transaction.sender = who_.address;
    c.transaction.recipient = Runtime::storage_address();
    c.transaction.nonce = sim_.chain_->next_nonce(who_.address);
    c.transaction.gas_limit = sim_.scenario_.tx_gas_limit;
    c.transaction.payload = contracts::call_store_certificate(sim_.params_.g(), *payload_);
    c.block_no = sim_.chain_->tip_height();
    c.inclusion_proof.leaf_index = 0;
    c.inclusion_proof.siblings.push_back({sha256(std::string_view("unlogged")), merkle::Side::Right});
    return c;
  }

  void check_timeout() {
    if (finished()) return;
    if (state_ != RequesterState::CreatedContract && state_ != RequesterState::Renewing &&
        state_ != RequesterState::AwaitingNonces && state_ != RequesterState::AwaitingSigs)
      return;
    if (sim_.chain_->tip_height() - start_height_ < sim_.scenario_.issuance_timeout_blocks) return;
    if (!contract_.is_zero()) {
      const DomainContractState& st = sim_.runtime_->domain(contract_);
      for (const auto& ca : st.authorized_cas) {
        const bool waiting = state_ == RequesterState::AwaitingNonces ? !st.nonce_of(ca)
                                                                      : st.nonce_of(ca) && !st.signature_of(ca);
        if (waiting) blocking_.push_back(sim_.directory_.by_address(ca).id);
      }
    }
    std::string why = "timeout after " + std::to_string(sim_.scenario_.issuance_timeout_blocks) + " blocks in " +
                      to_string(state_);
    if (!blocking_.empty()) {
      why += "; blocked by";
      for (const auto& id : blocking_) why += " " + id;
    }
    fail(why);
  }

  Simulation& sim_;
  Participant who_;
  IssuanceRequest req_;
  std::uint64_t tag_;
  RequesterState state_ = RequesterState::CreatedContract;
  std::uint64_t start_height_ = 0;
  SimTime start_time_ = 0;
  Address contract_;
  std::optional<Hash256> setup_tx_;
  std::optional<Hash256> storage_tx_;
  std::optional<certs::CertificatePayload> payload_;
  std::optional<certs::BlockPkiCertificate> cert_;
  std::string failure_;
  std::vector<std::string> blocking_;
  std::vector<std::string> misbehaving_;
};

// ---- simulation ----

Simulation::Simulation(Scenario scenario, std::uint64_t seed)
    : scenario_([&] {
        scenario.seed = seed;
        scenario.chain.rng_seed = seed;
        scenario.validate();
        return std::move(scenario);
      }()),
      params_(crypto::GroupParams::with_sha256(crypto::group_by_name(scenario_.group))),
      runtime_(std::make_unique<Runtime>(params_, scenario_.chain.gas, scenario_.runtime)),
      world_(seed ^ 0x5eedc0ffee123457ULL, deadline_ms(scenario_), world_adversary(scenario_)),
      rng_(seed ^ 0x0ddba11cafef00dULL) {
  owner_ = {"owner", Address::from_label("owner")};
  adversary_ = {validation::kAdversaryId, Address::from_label(validation::kAdversaryId)};

  std::map<Address, Amount> genesis{{owner_.address, scenario_.requester_funds},
                                    {adversary_.address, scenario_.requester_funds}};
  for (std::size_t i = 0; i < scenario_.num_cas; ++i) {
    cas_.push_back(std::make_unique<CaAgent>(*this, i, scenario_.behavior(i)));
    const CaAgent& ca = *cas_.back();
    directory_.add(CaIdentity{ca.self().id, ca.self().address, ca.key().public_key});
    genesis[ca.self().address] = kCaFunds;
  }
  chain_ = std::make_unique<ledger::Chain>(scenario_.chain, runtime_.get(), Address::from_label("miner"), genesis);

  domain_keys_[scenario_.domain] = domain_key(scenario_.domain);
  world_.add_domain(validation::SimulatedDomain{scenario_.domain, owner_.id, domain_keys_[scenario_.domain], {}});

  if (scenario_.runtime.on_chain_sig_check) {
    runtime_->set_partial_check([this](const DomainContractState& st, const Address& ca, const crypto::Scalar& s) {
      const certs::SigningContext ctx = certs::signing_context(params_, st, directory_);
      const auto nonce = st.nonce_of(ca);
      return nonce && crypto::verify_partial(params_, s, ctx.e, *nonce, directory_.by_address(ca).public_key);
    });
  }

  next_block_ = scenario_.timing.ideal
                    ? static_cast<SimTime>(std::llround(scenario_.chain.mean_block_interval_s * 1000.0))
                    : chain_->sample_block_interval();
}

Simulation::~Simulation() = default;

const crypto::KeyPair& Simulation::ca_key(const std::string& id) const {
  for (const auto& ca : cas_)
    if (ca->self().id == id) return ca->key();
  throw Error(ErrorCode::InvalidParams, "no CA named " + id);
}

std::vector<certs::TrustedCa> Simulation::trusted_cas() const {
  std::vector<certs::TrustedCa> out;
  for (const auto& ca : cas_)
    out.push_back({ca->self().id, ca->key().public_key, crypto::create_pop(params_, ca->self().id, ca->key())});
  return out;
}

std::map<std::string, Address> Simulation::owner_registry() const { return {{scenario_.domain, owner_.address}}; }

crypto::GroupElement Simulation::domain_key(const std::string& domain) const {
  auto it = domain_keys_.find(domain);
  if (it != domain_keys_.end()) return it->second;
  return crypto::keygen(params_, to_bytes("blockpki/sim/domain-key/" + domain)).public_key;
}

IssuanceRequest Simulation::default_request() const {
  IssuanceRequest r;
  r.requester = owner_.id;
  r.domain = scenario_.domain;
  for (std::size_t i = 0; i < scenario_.authorized; ++i) r.ca_ids.push_back(ca_id(i));
  if (scenario_.first_t_mode) r.first_t_threshold = scenario_.threshold;
  r.compensation = scenario_.compensation;
  return r;
}

void Simulation::at(SimTime when, std::function<void()> action) {
  queue_.emplace(std::make_pair(when, seq_++), std::move(action));
}

SimTime Simulation::exponential_ms(double mean_s) {
  if (scenario_.timing.ideal || mean_s <= 0) return 0;
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return static_cast<SimTime>(std::llround(-std::log1p(-u) * mean_s * 1000.0));
}

SimTime Simulation::propagation_delay() { return exponential_ms(scenario_.timing.propagation_mean_s); }
SimTime Simulation::validation_delay() { return exponential_ms(scenario_.timing.validation_mean_s); }

void Simulation::send(const Participant& from, const Address& to, Amount value, std::string payload, std::string kind,
                      std::uint64_t tag, std::function<void(const Hash256&)> on_hash) {
  at(now_ + propagation_delay(), [this, from, to, value, payload = std::move(payload), kind = std::move(kind), tag,
                                  on_hash = std::move(on_hash)] {
    ledger::Transaction tx;
    tx.sender = from.address;
    tx.recipient = to;
    tx.nonce = chain_->next_nonce(from.address);
    tx.value = value;
    tx.gas_limit = scenario_.tx_gas_limit;
    tx.payload = payload;
    const Hash256 h = chain_->submit_tx(std::move(tx));
    sent_[tag].push_back({h, kind, from.id});
    if (on_hash) on_hash(h);
  });
}

void Simulation::respond_to_challenge(const Address& contract_requester, const validation::Challenge& ch) {
  // Each requester's responder only answers challenges for its own requests.
  std::string actor;
  if (contract_requester == owner_.address) actor = owner_.id;
  else if (contract_requester == adversary_.address) actor = adversary_.id;
  else return;
  try {
    world_.complete_challenge(actor, ch);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::NoControl) throw;
  }
}

void Simulation::step() {
  if (!queue_.empty() && queue_.begin()->first.first <= next_block_) {
    auto node = queue_.extract(queue_.begin());
    now_ = node.key().first;
    node.mapped()();
    return;
  }
  now_ = next_block_;
  const ledger::Block& block = chain_->mine_next_block(now_);
  for (auto& ca : cas_) ca->on_block(block);
  const std::vector<RequesterAgent*> active = active_;
  for (auto* r : active) r->on_block(block);
  next_block_ = now_ + (scenario_.timing.ideal
                            ? static_cast<SimTime>(std::llround(scenario_.chain.mean_block_interval_s * 1000.0))
                            : chain_->sample_block_interval());
}

void Simulation::advance_blocks(std::uint64_t n) {
  const std::uint64_t target = chain_->tip_height() + n;
  while (chain_->tip_height() < target) step();
}

IssuanceResult Simulation::run(RequesterAgent& agent) {
  active_.push_back(&agent);
  struct Deregister {
    std::vector<RequesterAgent*>& list;
    RequesterAgent* agent;
    ~Deregister() { list.erase(std::remove(list.begin(), list.end(), agent), list.end()); }
  } guard{active_, &agent};
  // Generous backstop; the agent's own timeout normally ends a stuck round.
  const std::uint64_t limit = agent.start_height() + scenario_.issuance_timeout_blocks +
                              static_cast<std::uint64_t>(scenario_.chain.confirmation_depth) + 1000;
  while (!agent.finished() && chain_->tip_height() < limit) step();
  return agent.result();
}

IssuanceResult Simulation::issue(const IssuanceRequest& request) {
  const Participant& who = request.requester == adversary_.id ? adversary_ : owner_;
  RequesterAgent agent(*this, who, request, next_tag_++);
  agent.start_issuance();
  return run(agent);
}

IssuanceResult Simulation::renew(const Address& contract, const std::string& requester) {
  const Participant& who = requester == adversary_.id ? adversary_ : owner_;
  IssuanceRequest req;
  req.requester = who.id;
  const DomainContractState& st = runtime_->domain(contract);
  req.domain = st.cert_data.subject_name;
  for (const auto& ca : st.authorized_cas) req.ca_ids.push_back(directory_.by_address(ca).id);
  if (st.first_t_mode) req.first_t_threshold = st.threshold;
  RequesterAgent agent(*this, who, req, next_tag_++);
  agent.start_renewal(contract);
  return run(agent);
}

IssuanceMetrics Simulation::collect_metrics(std::uint64_t tag, std::uint64_t start_height, SimTime start_time) const {
  IssuanceMetrics m;
  m.start_height = start_height;
  m.end_height = chain_->tip_height();
  m.blocks_elapsed = m.end_height - start_height;
  m.sim_seconds = static_cast<double>(chain_->tip_time() - start_time) / 1000.0;
  auto it = sent_.find(tag);
  if (it == sent_.end()) return m;
  for (const auto& s : it->second) {
    const auto loc = chain_->store().find(s.hash);
    if (!loc) continue;
    const ledger::Transaction& tx = chain_->store().at(loc->height).transactions[loc->index];
    m.per_tx.push_back(TxRecord{s.kind, s.sender, s.hash, loc->height, tx.gas_used, tx.fee, tx.success});
    ++m.tx_count;
    m.total_gas += tx.gas_used;
    m.total_fees += tx.fee;
    if (s.kind == "createDomainContract" || s.kind == "renew") m.setup_gas += tx.gas_used;
  }
  return m;
}

}  // namespace blockpki::sim
