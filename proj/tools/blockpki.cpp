#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "blockpki/error.hpp"
#include "blockpki/sim/attack.hpp"
#include "blockpki/sim/benchmark.hpp"
#include "blockpki/sim/campaign.hpp"

using namespace blockpki;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kReject = 1;
constexpr int kInputError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
}

Json parse_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threshold;
  std::optional<std::size_t> repetitions;
  std::string out;
};

std::uint64_t resolve_seed(const Common& c, const sim::Scenario& s) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("BLOCKPKI_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, std::string("BLOCKPKI_SEED is not a number: ") + env);
    }
  }
  return s.seed;
}

sim::Scenario load_scenario(const Common& c) {
  sim::Scenario s = c.config.empty() ? sim::Scenario{} : sim::scenario_from_json(parse_json(c.config));
  if (c.threshold) s = sim::with_threshold(s, *c.threshold);
  if (c.repetitions) s.repetitions = *c.repetitions;
  s.seed = resolve_seed(c, s);
  s.validate();
  return s;
}

void add_common(CLI::App* cmd, Common& c, const std::string& out_help) {
  cmd->add_option("--config", c.config, "scenario JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "RNG seed (falls back to BLOCKPKI_SEED, then the scenario)");
  cmd->add_option("--threshold", c.threshold, "threshold T");
  cmd->add_option("--repetitions", c.repetitions, "number of runs");
  cmd->add_option("--out", c.out, out_help);
}

int cmd_issue(const Common& c) {
  const sim::Scenario s = load_scenario(c);
  const fs::path out = c.out.empty() ? fs::path(".") : fs::path(c.out);
  std::vector<sim::CampaignRow> rows;
  int code = kOk;
  for (std::size_t r = 0; r < s.repetitions; ++r) {
    const std::uint64_t seed = s.seed + r;
    sim::Simulation sim(s, seed);
    const sim::IssuanceResult res = sim.issue(sim.default_request());
    sim::CampaignRow row;
    row.seed = seed;
    row.threshold = s.threshold;
    row.success = res.success;
    row.failure = res.failure;
    row.metrics = res.metrics;
    row.tip_hash = sim.chain().tip_hash();
    rows.push_back(row);
    if (!res.success) {
      std::cerr << "issuance failed (seed " << seed << "): " << res.failure;
      if (!res.blocking_cas.empty()) {
        std::cerr << "; blocking:";
        for (const auto& id : res.blocking_cas) std::cerr << " " << id;
      }
      std::cerr << "\n";
      code = kReject;
      continue;
    }
    if (r == 0) {
      const auto& g = sim.params().g();
      write_file(out / "cert.json", certs::store_certificate_file(g, *res.certificate));
      write_file(out / "truststore.json", certs::truststore_json(g, sim.trusted_cas(), s.threshold).dump(2) + "\n");
      write_file(out / "chain.jsonl", sim.chain().store().dump_jsonl());
    }
    std::cout << "seed " << seed << ": issued " << s.domain << " with " << res.certificate->payload.issuers.size()
              << " issuers in " << res.metrics.blocks_elapsed << " blocks, " << res.metrics.tx_count << " txs, gas "
              << res.metrics.total_gas << "\n";
  }
  write_file(out / "metrics.csv", sim::metrics_csv(rows));
  write_file(out / "summary.json", sim::summary_json(rows).dump(2) + "\n");
  return code;
}

struct VerifyArgs {
  std::string cert;
  std::string truststore;
  std::string chain;
  std::string domain;
  std::string mode = "light";
  std::optional<std::int64_t> now;
  std::optional<std::size_t> threshold;
};

int cmd_verify(const VerifyArgs& a) {
  const Json ts_json = parse_json(a.truststore);
  const std::string group = ts_json.value("group", std::string("secp256k1"));
  const crypto::GroupParams params = crypto::GroupParams::with_sha256(crypto::group_by_name(group));
  const certs::BlockPkiCertificate cert = certs::load_certificate_file(params.g(), read_file(a.cert));
  const certs::ClientMode mode = certs::client_mode_from_string(a.mode);
  const std::size_t policy = a.threshold.value_or(ts_json.value("threshold", std::size_t{0}));
  if (policy == 0) throw Error(ErrorCode::ParseError, "trust store has no threshold; pass --threshold");

  certs::ClientTrustStore trust(params, certs::trusted_cas_from_json(params.g(), ts_json), mode, policy);
  std::shared_ptr<ledger::BlockStore> chain;
  if (!a.chain.empty()) chain = std::make_shared<ledger::BlockStore>(ledger::BlockStore::load_jsonl(read_file(a.chain)));
  if (mode != certs::ClientMode::Unaware) {
    if (!chain) throw Error(ErrorCode::ParseError, "--chain is required for " + a.mode + " clients");
    if (mode == certs::ClientMode::Full) trust.sync_chain(chain);
    else trust.sync_headers(chain->header_chain());
  }
  // Without --now the client's clock is the latest block it knows of.
  std::int64_t now = 0;
  if (a.now) now = *a.now;
  else if (chain) now = chain->blocks().back().header.timestamp_ms / 1000;
  else throw Error(ErrorCode::ParseError, "--now is required without --chain");

  const std::string domain = a.domain.empty() ? cert.payload.data.subject_name : a.domain;
  const certs::VerifyResult r = certs::verify_certificate(params, cert, trust, domain, now);
  if (!r.warning.empty()) std::cerr << "warning: " << r.warning << "\n";
  if (r.accepted) {
    std::cout << "accept\n";
    return kOk;
  }
  std::cout << "reject " << certs::to_string(*r.reason) << "\n";
  return kReject;
}

struct BenchArgs {
  Common common;
  std::vector<std::size_t> thresholds{2, 5, 10, 20};
  std::size_t iterations = 1000;
  bool serial = false;
  bool no_renewal = false;
};

int cmd_bench(const BenchArgs& a) {
  Common c = a.common;
  c.threshold.reset();
  const sim::Scenario s = load_scenario(c);
  sim::BenchmarkOptions opt;
  opt.thresholds = a.thresholds;
  opt.repetitions = a.common.repetitions.value_or(s.repetitions);
  opt.timing_iterations = a.iterations;
  opt.seed = s.seed;
  opt.parallel = !a.serial;
  opt.renewal = !a.no_renewal;
  const sim::BenchmarkReport report = sim::run_benchmark(s, opt);

  const fs::path out = a.common.out.empty() ? fs::path(".") : fs::path(a.common.out);
  write_file(out / "bench.json", sim::to_json(report).dump(2) + "\n");
  write_file(out / "bench_thresholds.csv", sim::threshold_csv(report));
  write_file(out / "bench_timing.csv", sim::timing_csv(report));
  write_file(out / "metrics.csv", sim::metrics_csv(report.runs));
  std::cout << sim::threshold_csv(report) << "\n" << sim::timing_csv(report) << "\n";
  std::cout << "gas fit: slope " << report.gas_fit.slope << ", intercept " << report.gas_fit.intercept << ", R^2 "
            << report.gas_fit.r2 << "\n";
  for (const auto& row : report.rows)
    if (row.successes != row.runs) return kReject;
  return kOk;
}

struct AttackArgs {
  Common common;
  std::optional<std::size_t> max_sum;
  bool unlogged = false;
};

int cmd_attack(const AttackArgs& a) {
  const sim::Scenario s = load_scenario(a.common);
  sim::AttackReport report;
  if (s.adversary) {
    report.threshold = s.threshold;
    report.cases.push_back(sim::run_attack(s, *s.adversary, !a.unlogged, s.seed));
  } else {
    report = sim::run_attack_grid(s, a.max_sum.value_or(s.threshold + 1), s.seed);
  }
  const std::string text = sim::to_json(report).dump(2) + "\n";
  if (a.common.out.empty()) std::cout << text;
  else write_file(a.common.out, text);

  std::cerr << "i,j,logged,constructible,unaware,light,full,anomalies\n";
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  for (const auto& k : report.cases)
    std::cerr << k.i << "," << k.j << "," << yn(k.logged) << "," << yn(k.constructible) << ","
              << yn(k.accepted_by(certs::ClientMode::Unaware)) << "," << yn(k.accepted_by(certs::ClientMode::Light))
              << "," << yn(k.accepted_by(certs::ClientMode::Full)) << "," << k.anomalies << "\n";
  return kOk;
}

struct ChainArgs {
  Common common;
  std::string action;
  std::string path;
};

int cmd_chain(const ChainArgs& a) {
  if (a.action == "dump") {
    const sim::Scenario s = load_scenario(a.common);
    sim::Simulation sim(s, s.seed);
    const sim::IssuanceResult r = sim.issue(sim.default_request());
    write_file(a.path, sim.chain().store().dump_jsonl());
    std::cout << "dumped " << sim.chain().tip_height() + 1 << " blocks, tip " << to_hex(sim.chain().tip_hash())
              << (r.success ? "" : " (issuance failed: " + r.failure + ")") << "\n";
    return kOk;
  }
  const ledger::BlockStore store = ledger::BlockStore::load_jsonl(read_file(a.path));
  std::cout << "loaded " << store.tip_height() + 1 << " blocks, tip " << to_hex(store.tip_hash()) << "\n";
  if (!a.common.out.empty()) write_file(a.common.out, store.dump_jsonl());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BlockPKI simulator: multi-signed certificates logged on a simulated chain"};
  app.require_subcommand(1);

  Common issue;
  auto* issue_cmd = app.add_subcommand("issue", "run an issuance and write cert.json, metrics.csv, summary.json");
  add_common(issue_cmd, issue, "output directory");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "verify a certificate as a client");
  verify_cmd->add_option("--cert", verify.cert, "certificate JSON")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--truststore", verify.truststore, "trust store JSON")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--chain", verify.chain, "chain dump (headers for light, blocks for full)")
      ->check(CLI::ExistingFile);
  verify_cmd->add_option("--domain", verify.domain, "visited domain (defaults to the subject)");
  verify_cmd->add_option("--mode", verify.mode, "client tier")
      ->check(CLI::IsMember({"unaware", "light", "full"}));
  verify_cmd->add_option("--now", verify.now, "current time in simulated seconds");
  verify_cmd->add_option("--threshold", verify.threshold, "client threshold policy");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "issuance campaign per T plus verification timing");
  add_common(bench_cmd, bench.common, "output directory");
  bench_cmd->remove_option(bench_cmd->get_option("--threshold"));
  bench_cmd->add_option("--threshold", bench.thresholds, "threshold list")->delimiter(',');
  bench_cmd->add_option("--iterations", bench.iterations, "timing iterations per stage")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--serial", bench.serial, "run campaigns on one thread");
  bench_cmd->add_flag("--no-renewal", bench.no_renewal, "skip renewals");

  AttackArgs attack;
  auto* attack_cmd = app.add_subcommand("attack", "adversary scenario or (i, j) grid");
  add_common(attack_cmd, attack.common, "report JSON file (stdout if omitted)");
  attack_cmd->add_option("--max-sum", attack.max_sum, "grid bound on i + j (default T + 1)");
  attack_cmd->add_flag("--unlogged", attack.unlogged, "adversary skips the storage contract");

  ChainArgs chain;
  auto* chain_cmd = app.add_subcommand("chain", "dump a simulated chain or load and check a dump");
  add_common(chain_cmd, chain.common, "re-dump target for load");
  chain_cmd->add_option("action", chain.action, "dump or load")->required()->check(CLI::IsMember({"dump", "load"}));
  chain_cmd->add_option("path", chain.path, "JSONL file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*issue_cmd) return cmd_issue(issue);
    if (*verify_cmd) return cmd_verify(verify);
    if (*bench_cmd) return cmd_bench(bench);
    if (*attack_cmd) return cmd_attack(attack);
    if (*chain_cmd) return cmd_chain(chain);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
