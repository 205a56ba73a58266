#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "blockpki/common.hpp"
#include "blockpki/crypto/group.hpp"
#include "blockpki/json_util.hpp"

namespace blockpki::validation {

inline constexpr const char* kWellKnownPrefix = "/.well-known/acme-challenge/";
inline constexpr const char* kAdversaryId = "adversary";

struct SimulatedDomain {
  std::string name;
  std::string owner;
  crypto::GroupElement key;
  std::map<std::string, std::string> served_files;
};

struct Challenge {
  std::uint64_t id = 0;
  std::string ca_id;
  std::string domain_name;
  std::string type = "http-01";
  std::string path;
  std::string expected_token;
  SimTime deadline = 0;
};

using Edge = std::pair<std::string, std::string>;  // (ca id, domain name)

struct AdversaryConfig {
  std::string target_domain;
  std::set<std::string> compromised_cas;
  std::set<Edge> impersonated_edges;

  // Number of impersonated CAs for the target domain.
  std::size_t j() const;
  std::size_t i() const { return compromised_cas.size(); }
  // Throws InvalidParams when a compromised CA also appears on an edge.
  void validate() const;
};

Json to_json(const AdversaryConfig& a);
// {target_domain, compromised_cas: [...], impersonated_edges: [[ca, domain], ...]}
AdversaryConfig adversary_from_json(const Json& j);

// Domains, pending challenges and each CA's view of what a domain serves.
class ValidationWorld {
 public:
  explicit ValidationWorld(std::uint64_t seed, SimTime deadline_ms = 30000,
                           std::optional<AdversaryConfig> adversary = std::nullopt);

  void add_domain(SimulatedDomain domain);
  const SimulatedDomain& domain(const std::string& name) const;
  bool has_domain(const std::string& name) const { return domains_.count(name) > 0; }
  const std::optional<AdversaryConfig>& adversary() const { return adversary_; }

  Challenge issue_challenge(const std::string& ca_id, const std::string& domain_name, SimTime now);
  // Throws NoControl unless the actor owns the domain or impersonates it
  // towards the challenging CA.
  void complete_challenge(const std::string& actor, const Challenge& challenge);
  bool check_challenge(const std::string& ca_id, const Challenge& challenge, SimTime now) const;

  bool is_compromised(const std::string& ca_id) const;
  bool impersonates(const std::string& ca_id, const std::string& domain_name) const;
  // What the CA sees at path on the domain, if anything.
  std::optional<std::string> view(const std::string& ca_id, const std::string& domain_name,
                                  const std::string& path) const;

 private:
  std::mt19937_64 rng_;
  SimTime deadline_ms_;
  std::optional<AdversaryConfig> adversary_;
  std::uint64_t next_id_ = 1;
  std::map<std::string, SimulatedDomain> domains_;
  // Content the adversary serves to one CA over an impersonated edge.
  std::map<Edge, std::map<std::string, std::string>> overlays_;
};

}  // namespace blockpki::validation
