#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "blockpki/error.hpp"
#include "blockpki/sim/simulation.hpp"

using namespace blockpki;
using namespace blockpki::sim;

namespace {

Scenario make_scenario(std::size_t t, bool ideal, int depth) {
  Scenario s;
  s.threshold = s.authorized = s.num_cas = t;
  s.timing.ideal = ideal;
  s.chain.confirmation_depth = depth;
  return s;
}

certs::ClientTrustStore trust_for(Simulation& sim, certs::ClientMode mode) {
  certs::ClientTrustStore ts(sim.params(), sim.trusted_cas(), mode, sim.scenario().threshold);
  auto store = std::make_shared<ledger::BlockStore>(sim.chain().store());
  if (mode == certs::ClientMode::Full) ts.sync_chain(store);
  else ts.sync_headers(sim.chain().header_chain());
  return ts;
}

}  // namespace

TEST_CASE("ideal schedule: four blocks without confirmations, sixteen with twelve") {
  for (std::size_t t : {1, 2, 4}) {
    Simulation a(make_scenario(t, true, 0), 11);
    const IssuanceResult r0 = a.issue(a.default_request());
    REQUIRE(r0.success);
    CHECK(r0.metrics.blocks_elapsed == 4);
    CHECK(r0.metrics.sim_seconds == doctest::Approx(60.0));

    Simulation b(make_scenario(t, true, 12), 11);
    const IssuanceResult r12 = b.issue(b.default_request());
    REQUIRE(r12.success);
    CHECK(r12.metrics.blocks_elapsed == 16);
  }
}

TEST_CASE("honest issuance produces 2T+2 transactions and a certificate all tiers accept") {
  for (std::size_t t : {2, 5}) {
    Simulation sim(make_scenario(t, false, 0), 3);
    const IssuanceResult r = sim.issue(sim.default_request());
    REQUIRE(r.success);
    CHECK(r.metrics.tx_count == 2 * t + 2);
    REQUIRE(r.certificate.has_value());
    CHECK(r.certificate->payload.issuers.size() == t);
    CHECK(r.certificate->payload.issuers.front() == "CA1");
    CHECK(r.metrics.blocks_elapsed >= 4);

    // Round structure: every partial lands after the block that completed the nonces.
    for (const auto& tx : r.metrics.per_tx)
      if (tx.kind == "sendCertSignature") CHECK(tx.height > r.metrics.nonces_gathered_height);

    const std::int64_t now = sim.chain().tip_time() / 1000;
    for (auto mode : {certs::ClientMode::Unaware, certs::ClientMode::Light, certs::ClientMode::Full}) {
      const auto ts = trust_for(sim, mode);
      const auto v = certs::verify_certificate(sim.params(), *r.certificate, ts, "www.example.com", now);
      CHECK_MESSAGE(v.accepted, certs::to_string(mode));
    }
    // Every CA was paid exactly once.
    const auto& st = sim.runtime().domain(r.contract);
    CHECK(st.paid.size() == t);
    CHECK(sim.chain().balance(r.contract) == 0);
  }
}

TEST_CASE("garbage signer is paid but assembly fails and names it") {
  Scenario s = make_scenario(3, false, 0);
  s.behaviors = {CaBehavior::Honest, CaBehavior::GarbageSigner, CaBehavior::Honest};
  Simulation sim(s, 5);
  const IssuanceResult r = sim.issue(sim.default_request());
  CHECK_FALSE(r.success);
  CHECK(r.failure.find("AssemblyFailed") != std::string::npos);
  CHECK(r.failure.find("CA2") != std::string::npos);
  REQUIRE(r.metrics.misbehaving_cas.size() == 1);
  CHECK(r.metrics.misbehaving_cas[0] == "CA2");
  CHECK(sim.runtime().domain(r.contract).paid.count(sim.directory().by_id("CA2").address) == 1);
}

TEST_CASE("on-chain checking leaves a garbage signer unpaid") {
  Scenario s = make_scenario(2, true, 0);
  s.behaviors = {CaBehavior::GarbageSigner, CaBehavior::Honest};
  s.runtime.on_chain_sig_check = true;
  Simulation sim(s, 5);
  const IssuanceResult r = sim.issue(sim.default_request());
  CHECK_FALSE(r.success);
  const auto& st = sim.runtime().domain(r.contract);
  CHECK(st.paid.count(sim.directory().by_id("CA1").address) == 0);
  CHECK(st.paid.count(sim.directory().by_id("CA2").address) == 1);
  CHECK(r.blocking_cas == std::vector<std::string>{"CA1"});
}

TEST_CASE("unresponsive CA blocks a default-mode issuance until timeout") {
  Scenario s = make_scenario(3, false, 0);
  s.behaviors = {CaBehavior::Honest, CaBehavior::Honest, CaBehavior::Unresponsive};
  Simulation sim(s, 9);
  const IssuanceResult r = sim.issue(sim.default_request());
  CHECK_FALSE(r.success);
  CHECK(r.final_state == RequesterState::Failed);
  CHECK(r.blocking_cas == std::vector<std::string>{"CA3"});
  CHECK(r.metrics.blocks_elapsed == s.issuance_timeout_blocks);
}

TEST_CASE("first-T mode completes despite unresponsive CAs and pays exactly T") {
  Scenario s;
  s.threshold = 3;
  s.authorized = s.num_cas = 5;
  s.first_t_mode = true;
  s.behaviors = {CaBehavior::Unresponsive, CaBehavior::Honest, CaBehavior::Honest, CaBehavior::Unresponsive,
                 CaBehavior::Honest};
  Simulation sim(s, 21);
  const IssuanceResult r = sim.issue(sim.default_request());
  REQUIRE(r.success);
  CHECK(r.certificate->payload.issuers.size() == 3);
  const auto& st = sim.runtime().domain(r.contract);
  CHECK(st.paid.size() == 3);
  Amount paid_out = 0;
  for (const auto& ca : st.paid) paid_out += st.compensations.at(ca);
  CHECK(paid_out == 3 * s.compensation);
  const auto ts = trust_for(sim, certs::ClientMode::Light);
  CHECK(certs::verify_certificate(sim.params(), *r.certificate, ts, s.domain, sim.chain().tip_time() / 1000).accepted);
}

TEST_CASE("first-T mode: with more responsive CAs, only the first T nonce senders are paid") {
  Scenario s;
  s.threshold = 2;
  s.authorized = s.num_cas = 4;
  s.first_t_mode = true;
  Simulation sim(s, 8);
  const IssuanceResult r = sim.issue(sim.default_request());
  REQUIRE(r.success);
  const auto& st = sim.runtime().domain(r.contract);
  CHECK(st.paid.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(st.paid.count(st.cert_pub_nonces[i].first) == 1);
}

TEST_CASE("renewal reuses the contract and saves exactly the creation gas") {
  for (std::size_t t : {2, 5}) {
    Simulation sim(make_scenario(t, true, 0), 4);
    const IssuanceResult first = sim.issue(sim.default_request());
    REQUIRE(first.success);
    const IssuanceResult again = sim.renew(first.contract, "owner");
    REQUIRE(again.success);
    CHECK(sim.runtime().domain_contracts().size() == 1);
    CHECK(again.metrics.tx_count == 2 * t + 2);
    const std::int64_t renewal_gas = again.metrics.total_gas - again.metrics.setup_gas;
    CHECK(renewal_gas == first.metrics.total_gas - first.metrics.setup_gas);
    CHECK(renewal_gas < first.metrics.total_gas);
    CHECK(again.certificate->payload.data.not_before > first.certificate->payload.data.not_before);
  }
}

TEST_CASE("unfunded requester surfaces InsufficientBalance") {
  Scenario s = make_scenario(2, true, 0);
  s.requester_funds = 0;
  Simulation sim(s, 1);
  try {
    sim.issue(sim.default_request());
    FAIL("expected InsufficientBalance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientBalance);
  }
}

TEST_CASE("fixed seed reproduces the chain") {
  auto tip = [](std::uint64_t seed) {
    Simulation sim(make_scenario(3, false, 2), seed);
    sim.issue(sim.default_request());
    return sim.chain().tip_hash();
  };
  CHECK(tip(17) == tip(17));
  CHECK(tip(17) != tip(18));
}

TEST_CASE("scenario json round trip") {
  Scenario s = make_scenario(5, true, 3);
  s.behaviors = {CaBehavior::Compromised};
  s.adversary = validation::AdversaryConfig{"www.example.com", {"CA2"}, {{"CA3", "www.example.com"}}};
  const Scenario back = scenario_from_json(to_json(s));
  CHECK(to_json(back) == to_json(s));
  CHECK_THROWS_AS(scenario_from_json(Json{{"threshold", 0}}), Error);
  CHECK_THROWS_AS(scenario_from_json(Json{{"ca_behaviors", {"lazy"}}}), Error);
}

#include "blockpki/sim/attack.hpp"

TEST_CASE("attack examples at T=3") {
  Scenario s;
  s.threshold = s.authorized = 3;
  s.num_cas = 5;
  auto adv = [&](std::size_t i, std::size_t j) {
    validation::AdversaryConfig a;
    a.target_domain = s.domain;
    for (std::size_t k = 0; k < i; ++k) a.compromised_cas.insert(ca_id(k));
    for (std::size_t k = i; k < i + j; ++k) a.impersonated_edges.insert({ca_id(k), s.domain});
    return a;
  };

  const AttackCase c11 = run_attack(s, adv(1, 1), true, 2);
  CHECK_FALSE(c11.constructible);
  CHECK(c11.anomalies == 0);
  for (auto m : {certs::ClientMode::Unaware, certs::ClientMode::Light, certs::ClientMode::Full})
    CHECK_FALSE(c11.accepted_by(m));

  const AttackCase c21 = run_attack(s, adv(2, 1), true, 2);
  CHECK(c21.constructible);
  CHECK(c21.anomalies == 1);
  for (auto m : {certs::ClientMode::Unaware, certs::ClientMode::Light, certs::ClientMode::Full})
    CHECK(c21.accepted_by(m));

  const AttackCase c30 = run_attack(s, adv(3, 0), false, 2);
  CHECK(c30.constructible);
  CHECK(c30.anomalies == 0);
  CHECK(c30.accepted_by(certs::ClientMode::Unaware));
  CHECK_FALSE(c30.accepted_by(certs::ClientMode::Light));
  CHECK_FALSE(c30.accepted_by(certs::ClientMode::Full));
  for (const auto& t : c30.tiers)
    if (t.mode != certs::ClientMode::Unaware)
      CHECK((t.reason == certs::RejectReason::BadInclusion || t.reason == certs::RejectReason::UnknownBlock));
}

TEST_CASE("monitor: honest history is clean") {
  Simulation sim(make_scenario(3, false, 0), 6);
  REQUIRE(sim.issue(sim.default_request()).success);
  REQUIRE(sim.issue(sim.default_request()).success);
  CHECK(monitor_scan(sim.runtime(), sim.owner_registry(), {{"www.example.com", sim.domain_key("www.example.com")}})
            .empty());
}

#include <omp.h>

#include "blockpki/sim/campaign.hpp"

TEST_CASE("parallel campaign matches the serial reference") {
  Scenario s = make_scenario(3, false, 1);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 12; ++i) seeds.push_back(100 + i);
  omp_set_num_threads(4);
  const auto par = run_campaign(s, seeds, true);
  const auto ser = run_campaign_serial(s, seeds, true);
  REQUIRE(par.size() == ser.size());
  CHECK(metrics_csv(par) == metrics_csv(ser));
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].tip_hash == ser[i].tip_hash);
    CHECK(par[i].renewal.has_value());
  }
  const Json summary = summary_json(ser);
  CHECK(summary["runs"] == 12);
  CHECK(summary["successes"] == 12);
}
