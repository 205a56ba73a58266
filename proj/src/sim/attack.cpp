#include "blockpki/sim/attack.hpp"

#include <algorithm>

#include "blockpki/error.hpp"

namespace blockpki::sim {

std::vector<Anomaly> monitor_scan(const contracts::Runtime& runtime, const std::map<std::string, Address>& owners,
                                  const std::map<std::string, crypto::GroupElement>& keys) {
  std::vector<Anomaly> out;
  for (const auto& rec : runtime.stored_certificates()) {
    const std::string& subject = rec.payload.data.subject_name;
    auto owner = owners.find(subject);
    if (owner == owners.end()) continue;
    std::string reason;
    if (rec.sender != owner->second) reason = "published by an account other than the registered owner";
    auto key = keys.find(subject);
    if (key != keys.end() && rec.payload.data.public_key != key->second)
      reason += std::string(reason.empty() ? "" : "; ") + "public key differs from the registered key";
    if (!reason.empty()) out.push_back(Anomaly{rec.index, subject, rec.sender, rec.tx_hash, reason});
  }
  return out;
}

bool AttackCase::accepted_by(certs::ClientMode m) const {
  for (const auto& t : tiers)
    if (t.mode == m) return t.accepted;
  return false;
}

Json to_json(const AttackCase& c) {
  Json tiers = Json::object();
  for (const auto& t : c.tiers)
    tiers[certs::to_string(t.mode)] =
        Json{{"accepted", t.accepted}, {"reason", t.reason ? certs::to_string(*t.reason) : std::string()}};
  return Json{{"i", c.i},
              {"j", c.j},
              {"logged", c.logged},
              {"constructible", c.constructible},
              {"failure", c.failure},
              {"tiers", tiers},
              {"monitor_anomalies", c.anomalies}};
}

Json to_json(const AttackReport& r) {
  Json cases = Json::array();
  for (const auto& c : r.cases) cases.push_back(to_json(c));
  return Json{{"threshold", r.threshold}, {"cases", cases}};
}

AttackCase run_attack(const Scenario& base, const validation::AdversaryConfig& adversary, bool logged,
                      std::uint64_t seed) {
  Scenario s = base;
  s.adversary = adversary;
  if (s.adversary->target_domain.empty()) s.adversary->target_domain = s.domain;
  Simulation sim(s, seed);

  AttackCase out;
  out.i = adversary.i();
  out.j = adversary.j();
  out.logged = logged;

  const IssuanceResult honest = sim.issue(sim.default_request());
  if (!honest.success) throw Error(ErrorCode::InvalidParams, "honest issuance failed: " + honest.failure);

  IssuanceRequest req;
  req.requester = validation::kAdversaryId;
  req.domain = s.adversary->target_domain;
  req.compensation = s.compensation;
  req.log_certificate = logged;
  std::vector<std::string> order(adversary.compromised_cas.begin(), adversary.compromised_cas.end());
  for (const auto& [ca, d] : adversary.impersonated_edges)
    if (d == req.domain && std::find(order.begin(), order.end(), ca) == order.end()) order.push_back(ca);
  for (std::size_t k = 0; k < s.num_cas; ++k)
    if (std::find(order.begin(), order.end(), ca_id(k)) == order.end()) order.push_back(ca_id(k));
  order.resize(std::min(order.size(), s.threshold));
  req.ca_ids = order;

  const IssuanceResult attack = sim.issue(req);
  out.constructible = attack.success && attack.certificate.has_value();
  out.failure = attack.failure;

  auto headers = sim.chain().header_chain();
  auto store = std::make_shared<ledger::BlockStore>(sim.chain().store());
  const std::int64_t now = sim.chain().tip_time() / 1000;
  for (auto mode : s.client_tiers) {
    TierOutcome t;
    t.mode = mode;
    if (out.constructible) {
      certs::ClientTrustStore ts(sim.params(), sim.trusted_cas(), mode, s.threshold);
      if (mode == certs::ClientMode::Full) ts.sync_chain(store);
      else ts.sync_headers(headers);
      const auto v = certs::verify_certificate(sim.params(), *attack.certificate, ts, req.domain, now);
      t.accepted = v.accepted;
      t.reason = v.reason;
    }
    out.tiers.push_back(t);
  }
  out.anomalies = monitor_scan(sim.runtime(), sim.owner_registry(), {{s.domain, sim.domain_key(s.domain)}}).size();
  return out;
}

AttackReport run_attack_grid(const Scenario& base, std::size_t max_sum, std::uint64_t seed) {
  AttackReport report;
  report.threshold = base.threshold;
  for (std::size_t i = 0; i <= max_sum; ++i) {
    for (std::size_t j = 0; i + j <= max_sum; ++j) {
      if (i + j > base.num_cas) continue;
      validation::AdversaryConfig adv;
      adv.target_domain = base.domain;
      for (std::size_t k = 0; k < i; ++k) adv.compromised_cas.insert(ca_id(k));
      for (std::size_t k = i; k < i + j; ++k) adv.impersonated_edges.insert({ca_id(k), base.domain});
      for (bool logged : {true, false}) report.cases.push_back(run_attack(base, adv, logged, seed));
    }
  }
  return report;
}

}  // namespace blockpki::sim
