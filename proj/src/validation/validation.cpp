#include "blockpki/validation.hpp"

#include "blockpki/error.hpp"

namespace blockpki::validation {

std::size_t AdversaryConfig::j() const {
  std::set<std::string> cas;
  for (const auto& [ca, d] : impersonated_edges)
    if (d == target_domain) cas.insert(ca);
  return cas.size();
}

void AdversaryConfig::validate() const {
  for (const auto& [ca, d] : impersonated_edges)
    if (compromised_cas.count(ca))
      throw Error(ErrorCode::InvalidParams, ca + " is both compromised and impersonated");
}

Json to_json(const AdversaryConfig& a) {
  Json edges = Json::array();
  for (const auto& [ca, d] : a.impersonated_edges) edges.push_back(Json::array({ca, d}));
  return Json{{"target_domain", a.target_domain}, {"compromised_cas", a.compromised_cas}, {"impersonated_edges", edges}};
}

AdversaryConfig adversary_from_json(const Json& j) {
  AdversaryConfig a;
  try {
    a.target_domain = j.at("target_domain").get<std::string>();
    for (const auto& ca : j.value("compromised_cas", Json::array())) a.compromised_cas.insert(ca.get<std::string>());
    for (const auto& e : j.value("impersonated_edges", Json::array())) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::ParseError, "edge must be [ca, domain]");
      a.impersonated_edges.emplace(e[0].get<std::string>(), e[1].get<std::string>());
    }
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("adversary config: ") + ex.what());
  }
  a.validate();
  return a;
}

ValidationWorld::ValidationWorld(std::uint64_t seed, SimTime deadline_ms, std::optional<AdversaryConfig> adversary)
    : rng_(seed), deadline_ms_(deadline_ms), adversary_(std::move(adversary)) {
  if (adversary_) adversary_->validate();
}

void ValidationWorld::add_domain(SimulatedDomain domain) {
  std::string name = domain.name;
  domains_[name] = std::move(domain);
}

const SimulatedDomain& ValidationWorld::domain(const std::string& name) const {
  auto it = domains_.find(name);
  if (it == domains_.end()) throw Error(ErrorCode::InvalidParams, "unknown domain " + name);
  return it->second;
}

Challenge ValidationWorld::issue_challenge(const std::string& ca_id, const std::string& domain_name, SimTime now) {
  Challenge c;
  c.id = next_id_++;
  c.ca_id = ca_id;
  c.domain_name = domain_name;
  Bytes token(16);
  for (std::size_t i = 0; i < token.size(); i += 8) {
    const std::uint64_t r = rng_();
    for (std::size_t b = 0; b < 8; ++b) token[i + b] = static_cast<std::uint8_t>(r >> (8 * b));
  }
  c.expected_token = to_hex(token);
  c.path = std::string(kWellKnownPrefix) + std::to_string(c.id);
  c.deadline = now + deadline_ms_;
  return c;
}

bool ValidationWorld::is_compromised(const std::string& ca_id) const {
  return adversary_ && adversary_->compromised_cas.count(ca_id) > 0;
}

bool ValidationWorld::impersonates(const std::string& ca_id, const std::string& domain_name) const {
  return adversary_ && adversary_->impersonated_edges.count({ca_id, domain_name}) > 0;
}

void ValidationWorld::complete_challenge(const std::string& actor, const Challenge& challenge) {
  auto it = domains_.find(challenge.domain_name);
  if (it == domains_.end()) throw Error(ErrorCode::NoControl, actor + " cannot serve unknown domain " + challenge.domain_name);
  if (actor == it->second.owner) {
    it->second.served_files[challenge.path] = challenge.expected_token;
    return;
  }
  if (actor == kAdversaryId && impersonates(challenge.ca_id, challenge.domain_name)) {
    overlays_[{challenge.ca_id, challenge.domain_name}][challenge.path] = challenge.expected_token;
    return;
  }
  throw Error(ErrorCode::NoControl, actor + " does not control " + challenge.domain_name + " towards " + challenge.ca_id);
}

std::optional<std::string> ValidationWorld::view(const std::string& ca_id, const std::string& domain_name,
                                                 const std::string& path) const {
  auto ov = overlays_.find({ca_id, domain_name});
  if (ov != overlays_.end()) {
    auto f = ov->second.find(path);
    if (f != ov->second.end()) return f->second;
  }
  auto d = domains_.find(domain_name);
  if (d == domains_.end()) return std::nullopt;
  auto f = d->second.served_files.find(path);
  if (f == d->second.served_files.end()) return std::nullopt;
  return f->second;
}

bool ValidationWorld::check_challenge(const std::string& ca_id, const Challenge& challenge, SimTime now) const {
  if (is_compromised(ca_id) && adversary_->target_domain == challenge.domain_name) return true;
  if (now > challenge.deadline) return false;
  return view(ca_id, challenge.domain_name, challenge.path) == challenge.expected_token;
}

}  // namespace blockpki::validation
