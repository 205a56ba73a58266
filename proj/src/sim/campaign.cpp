#include "blockpki/sim/campaign.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <set>

#include "blockpki/error.hpp"

namespace blockpki::sim {

CampaignRow run_one(const Scenario& scenario, std::uint64_t seed, bool with_renewal) {
  Simulation sim(scenario, seed);
  const IssuanceResult r = sim.issue(sim.default_request());
  CampaignRow row;
  row.seed = seed;
  row.threshold = scenario.threshold;
  row.success = r.success;
  row.failure = r.failure;
  row.metrics = r.metrics;
  if (with_renewal && r.success) {
    const IssuanceResult again = sim.renew(r.contract, "owner");
    row.renewal = again.metrics;
    if (!again.success) {
      row.success = false;
      row.failure = "renewal: " + again.failure;
    }
  }
  row.tip_hash = sim.chain().tip_hash();
  return row;
}

std::vector<CampaignRow> run_campaign_serial(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                             bool with_renewal) {
  std::vector<CampaignRow> rows;
  rows.reserve(seeds.size());
  for (auto seed : seeds) rows.push_back(run_one(scenario, seed, with_renewal));
  return rows;
}

std::vector<CampaignRow> run_campaign(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                      bool with_renewal) {
  std::vector<CampaignRow> rows(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  const auto n = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      rows[i] = run_one(scenario, seeds[i], with_renewal);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string metrics_csv(const std::vector<CampaignRow>& rows) {
  std::string out = "seed,T,success,blocks_elapsed,sim_seconds,tx_count,total_gas,total_fees\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.3f", r.metrics.sim_seconds);
    out += std::to_string(r.seed) + "," + std::to_string(r.threshold) + "," + (r.success ? "1" : "0") + "," +
           std::to_string(r.metrics.blocks_elapsed) + "," + buf + "," + std::to_string(r.metrics.tx_count) + "," +
           std::to_string(r.metrics.total_gas) + "," + std::to_string(r.metrics.total_fees) + "\n";
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

Json to_json(const IssuanceMetrics& m) {
  Json txs = Json::array();
  for (const auto& t : m.per_tx)
    txs.push_back(Json{{"kind", t.kind},
                       {"sender", t.sender},
                       {"tx_hash", to_hex(t.hash)},
                       {"height", t.height},
                       {"gas_used", t.gas_used},
                       {"fee", t.fee},
                       {"success", t.success}});
  return Json{{"threshold", m.threshold},
              {"start_height", m.start_height},
              {"end_height", m.end_height},
              {"blocks_elapsed", m.blocks_elapsed},
              {"sim_seconds", m.sim_seconds},
              {"tx_count", m.tx_count},
              {"total_gas", m.total_gas},
              {"total_fees", m.total_fees},
              {"setup_gas", m.setup_gas},
              {"misbehaving_cas", m.misbehaving_cas},
              {"per_tx", txs}};
}

Json summary_json(const std::vector<CampaignRow>& rows) {
  std::vector<double> blocks, seconds;
  std::size_t ok = 0;
  double gas = 0;
  std::set<std::string> misbehaving;
  for (const auto& r : rows) {
    if (!r.success) continue;
    ++ok;
    blocks.push_back(static_cast<double>(r.metrics.blocks_elapsed));
    seconds.push_back(r.metrics.sim_seconds);
    gas += static_cast<double>(r.metrics.total_gas);
  }
  for (const auto& r : rows)
    for (const auto& id : r.metrics.misbehaving_cas) misbehaving.insert(id);
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  return Json{{"runs", rows.size()},
              {"successes", ok},
              {"mean_blocks_elapsed", mean(blocks)},
              {"median_blocks_elapsed", median(blocks)},
              {"mean_sim_seconds", mean(seconds)},
              {"median_sim_seconds", median(seconds)},
              {"mean_total_gas", ok ? gas / static_cast<double>(ok) : 0.0},
              {"misbehaving_cas", misbehaving}};
}

}  // namespace blockpki::sim
