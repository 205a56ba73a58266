#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blockpki/sim/simulation.hpp"

namespace blockpki::sim {

struct CampaignRow {
  std::uint64_t seed = 0;
  std::size_t threshold = 0;
  bool success = false;
  std::string failure;
  IssuanceMetrics metrics;
  // Present when the campaign also renews each certificate.
  std::optional<IssuanceMetrics> renewal;
  Hash256 tip_hash{};
};

// One independent simulation per seed, each running the scenario's default
// request. Runs are spread over OpenMP threads; rows keep seed order.
std::vector<CampaignRow> run_campaign(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                      bool with_renewal = false);
// Single-threaded reference producing identical rows.
std::vector<CampaignRow> run_campaign_serial(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                             bool with_renewal = false);

CampaignRow run_one(const Scenario& scenario, std::uint64_t seed, bool with_renewal);

// seed,T,success,blocks_elapsed,sim_seconds,tx_count,total_gas,total_fees
std::string metrics_csv(const std::vector<CampaignRow>& rows);
Json summary_json(const std::vector<CampaignRow>& rows);
Json to_json(const IssuanceMetrics& m);

double median(std::vector<double> values);

}  // namespace blockpki::sim
