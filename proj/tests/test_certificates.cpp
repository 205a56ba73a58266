#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "blockpki/error.hpp"
#include "blockpki/sim/simulation.hpp"

using namespace blockpki;
using namespace blockpki::certs;
using namespace blockpki::sim;

namespace {

struct Fixture {
  Simulation sim;
  IssuanceResult result;
  std::int64_t now;

  explicit Fixture(std::size_t t = 4, int depth = 0, std::uint64_t seed = 31) : sim(scenario(t, depth), seed) {
    result = sim.issue(sim.default_request());
    REQUIRE(result.success);
    sim.advance_blocks(2);
    now = result.certificate->payload.data.not_before + 10;
  }

  static Scenario scenario(std::size_t t, int depth) {
    Scenario s;
    s.threshold = s.authorized = s.num_cas = t;
    s.chain.confirmation_depth = depth;
    return s;
  }

  ClientTrustStore trust(ClientMode mode, std::size_t policy = 0) {
    ClientTrustStore ts(sim.params(), sim.trusted_cas(), mode, policy ? policy : sim.scenario().threshold);
    if (mode == ClientMode::Full) ts.sync_chain(std::make_shared<ledger::BlockStore>(sim.chain().store()));
    else ts.sync_headers(sim.chain().header_chain());
    return ts;
  }

  VerifyResult verify(const BlockPkiCertificate& c, ClientMode mode, std::string domain = "www.example.com",
                      std::optional<std::int64_t> at = std::nullopt) {
    return verify_certificate(sim.params(), c, trust(mode), domain, at.value_or(now));
  }

  const BlockPkiCertificate& cert() const { return *result.certificate; }
};

const ClientMode kAllModes[] = {ClientMode::Unaware, ClientMode::Light, ClientMode::Full};

}  // namespace

TEST_CASE("canonical encoding") {
  CertData d;
  d.subject_name = "www.example.com";
  d.public_key.encoding = Bytes{2, 1, 2, 3};
  d.not_before = 100;
  d.not_after = 200;
  const std::vector<std::string> issuers = {"CA1", "CA2"};
  const std::string m = canonical_encode(d, issuers);
  CHECK(m == canonical_encode(d, issuers));
  CHECK(m == R"({"issuers":["CA1","CA2"],"notAfter":200,"notBefore":100,"publicKey":"02010203","subjectName":"www.example.com"})");

  // Input field order does not matter.
  const Json permuted = Json::parse(R"({"subjectName":"www.example.com","notAfter":200,"publicKey":"02010203","notBefore":100})");
  CHECK(canonical_encode(cert_data_from_json(permuted), issuers) == m);

  CertData later = d;
  later.not_after = 201;
  CHECK(canonical_encode(later, issuers) != m);
  CHECK(canonical_encode(d, {"CA2", "CA1"}) != m);
}

TEST_CASE("honest certificate has the file layout and is accepted by all tiers") {
  Fixture f;
  CHECK(f.cert().payload.issuers == std::vector<std::string>{"CA1", "CA2", "CA3", "CA4"});
  const Json j = to_json(f.sim.params().g(), f.cert());
  CHECK(j.contains("certificateData"));
  CHECK(j["certificateData"].contains("schnorrSignature"));
  CHECK(j["domainCertificate"].contains("inclusionProof"));
  CHECK(j["domainCertificate"].contains("blockNo"));
  CHECK(j["domainCertificate"].contains("transaction"));
  for (auto mode : kAllModes) CHECK(f.verify(f.cert(), mode).accepted);
  CHECK_FALSE(f.verify(f.cert(), ClientMode::Unaware).warning.empty());
}

TEST_CASE("certificate file round trip is byte exact") {
  Fixture f(2);
  const auto& g = f.sim.params().g();
  const std::string text = store_certificate_file(g, f.cert());
  const BlockPkiCertificate back = load_certificate_file(g, text);
  CHECK(back == f.cert());
  CHECK(store_certificate_file(g, back) == text);
  CHECK_THROWS_AS(load_certificate_file(g, "{"), Error);
  CHECK_THROWS_AS(load_certificate_file(g, R"({"certificateData":{}})"), Error);
}

TEST_CASE("rejection suite") {
  Fixture f;
  const auto& c = f.cert();

  SUBCASE("wrong domain") {
    for (auto mode : kAllModes) CHECK(f.verify(c, mode, "www.example.org").reason == RejectReason::WrongDomain);
  }
  SUBCASE("validity window") {
    CHECK(f.verify(c, ClientMode::Light, "www.example.com", c.payload.data.not_after + 1).reason == RejectReason::Expired);
    CHECK(f.verify(c, ClientMode::Light, "www.example.com", c.payload.data.not_before - 1).reason ==
          RejectReason::NotYetValid);
    CHECK(f.verify(c, ClientMode::Light, "www.example.com", c.payload.data.not_after).accepted);
    CHECK(f.verify(c, ClientMode::Light, "www.example.com", c.payload.data.not_before).accepted);
  }
  SUBCASE("untrusted issuer rejects instead of being skipped") {
    auto cas = f.sim.trusted_cas();
    cas.erase(cas.begin() + 1);
    ClientTrustStore ts(f.sim.params(), cas, ClientMode::Light, 3);
    ts.sync_headers(f.sim.chain().header_chain());
    CHECK(verify_certificate(f.sim.params(), c, ts, "www.example.com", f.now).reason == RejectReason::UntrustedIssuer);
  }
  SUBCASE("sub-threshold issuer list") {
    ClientTrustStore ts(f.sim.params(), f.sim.trusted_cas(), ClientMode::Light, 5);
    ts.sync_headers(f.sim.chain().header_chain());
    CHECK(verify_certificate(f.sim.params(), c, ts, "www.example.com", f.now).reason == RejectReason::BelowThreshold);
  }
  SUBCASE("issuer list of size T-1") {
    BlockPkiCertificate short_list = c;
    short_list.payload.issuers.pop_back();
    CHECK(f.verify(short_list, ClientMode::Unaware).reason == RejectReason::BelowThreshold);
  }
  SUBCASE("repeated issuer cannot pad the count") {
    BlockPkiCertificate dup = c;
    dup.payload.issuers[3] = dup.payload.issuers[0];
    CHECK(f.verify(dup, ClientMode::Unaware).reason == RejectReason::BelowThreshold);
  }
  SUBCASE("reordered issuers change m and break the signature") {
    BlockPkiCertificate swapped = c;
    std::swap(swapped.payload.issuers[0], swapped.payload.issuers[1]);
    CHECK(f.verify(swapped, ClientMode::Unaware).reason == RejectReason::BadSignature);
  }
  SUBCASE("tampered signature") {
    BlockPkiCertificate bad = c;
    bad.payload.signature.s_bar = f.sim.params().g().add(bad.payload.signature.s_bar, crypto::Scalar{1});
    CHECK(f.verify(bad, ClientMode::Unaware).reason == RejectReason::BadSignature);
  }
  SUBCASE("tampered inclusion proof separates the tiers") {
    BlockPkiCertificate bad = c;
    // The storage tx is often alone in its block; a forged sibling must fail as well.
    if (bad.inclusion_proof.siblings.empty()) bad.inclusion_proof.siblings.push_back({c.transaction.hash(), merkle::Side::Right});
    else bad.inclusion_proof.siblings[0].hash[0] ^= 1;
    CHECK(f.verify(bad, ClientMode::Light).reason == RejectReason::BadInclusion);
    CHECK(f.verify(bad, ClientMode::Full).reason == RejectReason::BadInclusion);
    CHECK(f.verify(bad, ClientMode::Unaware).accepted);
  }
  SUBCASE("block beyond the known headers") {
    BlockPkiCertificate bad = c;
    bad.block_no = f.sim.chain().tip_height() + 5;
    CHECK(f.verify(bad, ClientMode::Light).reason == RejectReason::UnknownBlock);
    CHECK(f.verify(bad, ClientMode::Full).reason == RejectReason::UnknownBlock);
  }
  SUBCASE("transaction that does not carry the payload") {
    BlockPkiCertificate bad = c;
    bad.payload.data.not_after += 1;  // payload no longer matches the logged one, nor its signature
    CHECK(f.verify(bad, ClientMode::Unaware).reason == RejectReason::BadSignature);
  }
}

TEST_CASE("light client with stale headers reports UnknownBlock") {
  Fixture f;
  ClientTrustStore ts(f.sim.params(), f.sim.trusted_cas(), ClientMode::Light, 4);
  auto headers = f.sim.chain().header_chain();
  headers.resize(f.cert().block_no);
  ts.sync_headers(headers);
  CHECK(verify_certificate(f.sim.params(), f.cert(), ts, "www.example.com", f.now).reason == RejectReason::UnknownBlock);
}

TEST_CASE("broken header chain is refused by the trust store") {
  Fixture f(2);
  ClientTrustStore ts(f.sim.params(), f.sim.trusted_cas(), ClientMode::Light, 2);
  auto headers = f.sim.chain().header_chain();
  headers[2].tx_root[0] ^= 1;
  CHECK_THROWS_AS(ts.sync_headers(headers), Error);
}

TEST_CASE("trust store checks proofs of possession at load") {
  Fixture f(2);
  auto cas = f.sim.trusted_cas();
  cas[1].pop = cas[0].pop;
  CHECK_THROWS_AS(ClientTrustStore(f.sim.params(), cas, ClientMode::Light, 2), Error);
  CHECK_NOTHROW(ClientTrustStore(f.sim.params(), cas, ClientMode::Light, 2, false));

  const auto& g = f.sim.params().g();
  const Json j = truststore_json(g, f.sim.trusted_cas(), 2);
  const auto back = trusted_cas_from_json(g, j);
  REQUIRE(back.size() == f.sim.trusted_cas().size());
  CHECK(back[0].public_key == f.sim.trusted_cas()[0].public_key);
  CHECK(back[0].pop.pop_sig == f.sim.trusted_cas()[0].pop.pop_sig);
}

TEST_CASE("confirmation depth 0: certificate ready in the block of the storage tx") {
  Fixture f(2, 0);
  CHECK(f.cert().block_no == f.result.metrics.end_height);
  Fixture g(2, 3);
  CHECK(g.cert().block_no + 3 == g.result.metrics.end_height);
}

TEST_CASE("property: acceptance sets are nested full <= light <= unaware") {
  Fixture f(3);
  std::mt19937_64 rng(5);
  const auto& base = f.cert();
  const auto& g = f.sim.params().g();
  std::size_t full = 0, light = 0, unaware = 0;
  for (int trial = 0; trial < 300; ++trial) {
    BlockPkiCertificate c = base;
    switch (rng() % 7) {
      case 0: break;
      case 1:
        if (!c.inclusion_proof.siblings.empty())
          c.inclusion_proof.siblings[rng() % c.inclusion_proof.siblings.size()].hash[rng() % 32] ^= 1;
        break;
      case 2: c.block_no = rng() % (f.sim.chain().tip_height() + 3); break;
      case 3: c.inclusion_proof.leaf_index ^= 1; break;
      case 4: c.transaction.nonce += 1; break;
      case 5: c.payload.signature.e = g.add(c.payload.signature.e, crypto::Scalar{1}); break;
      case 6: c.transaction.payload += " "; break;
    }
    const bool a_full = f.verify(c, ClientMode::Full).accepted;
    const bool a_light = f.verify(c, ClientMode::Light).accepted;
    const bool a_unaware = f.verify(c, ClientMode::Unaware).accepted;
    CHECK((!a_full || a_light));
    CHECK((!a_light || a_unaware));
    full += a_full;
    light += a_light;
    unaware += a_unaware;
    // Logging guarantee: a light/full acceptance implies the tx is in the chain.
    if (a_light) CHECK(f.sim.chain().store().find(c.transaction.hash()).has_value());
  }
  CHECK(full > 0);
  CHECK(unaware > light);
}

TEST_CASE("assembly identifies a bad partial") {
  Scenario s = Fixture::scenario(3, 0);
  s.behaviors = {CaBehavior::Honest, CaBehavior::Honest, CaBehavior::GarbageSigner};
  Simulation sim(s, 2);
  const IssuanceResult r = sim.issue(sim.default_request());
  REQUIRE_FALSE(r.success);
  try {
    combine_from_contract(sim.params(), sim.runtime().domain(r.contract), sim.directory());
    FAIL("expected AssemblyFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AssemblyFailed);
    CHECK(std::string(e.what()).find("CA3") != std::string::npos);
    CHECK(std::string(e.what()).find("CA1") == std::string::npos);
  }
}
