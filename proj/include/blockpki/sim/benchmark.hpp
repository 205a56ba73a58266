#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockpki/crypto/multisig.hpp"
#include "blockpki/sim/campaign.hpp"

namespace blockpki::sim {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

// Ordinary least squares. Throws InvalidParams for fewer than two points.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Median wall-clock nanoseconds per verification stage.
struct TimingRow {
  std::size_t threshold = 0;
  std::size_t iterations = 0;
  double key_combination_ns = 0;
  double inclusion_check_ns = 0;
  double sig_verify_ns = 0;
};

// Signs a certificate-sized message with T fresh keys, places the tx in a
// block with ten others, then times each stage over `iterations` runs.
TimingRow time_verification(const crypto::GroupParams& params, std::size_t threshold, std::size_t iterations,
                            std::uint64_t seed);

struct ThresholdRow {
  std::size_t threshold = 0;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double mean_blocks = 0;
  double median_blocks = 0;
  double mean_sim_seconds = 0;
  double median_sim_seconds = 0;
  double tx_count = 0;
  double total_gas = 0;
  double creation_gas = 0;
  // Gas of a renewal issuance, excluding the renew tx that refunds the escrow.
  double renewal_gas = 0;
  // The creation tx was the most expensive tx of every run.
  bool creation_most_expensive = true;
};

struct BenchmarkReport {
  std::uint64_t seed = 0;
  std::size_t repetitions = 0;
  std::vector<ThresholdRow> rows;
  std::vector<TimingRow> timing;
  LinearFit gas_fit;
  std::vector<CampaignRow> runs;
};

struct BenchmarkOptions {
  std::vector<std::size_t> thresholds{2, 5, 10, 20};
  std::size_t repetitions = 10;
  std::size_t timing_iterations = 1000;
  std::uint64_t seed = 1;
  bool renewal = true;
  bool parallel = true;
};

// Campaign seeds for repetition r are seed + r, shared across thresholds.
BenchmarkReport run_benchmark(const Scenario& base, const BenchmarkOptions& options);

ThresholdRow summarize(std::size_t threshold, const std::vector<CampaignRow>& rows);

Json to_json(const BenchmarkReport& r);
// T,runs,successes,mean_blocks,median_blocks,mean_sim_seconds,tx_count,total_gas,creation_gas,renewal_gas
std::string threshold_csv(const BenchmarkReport& r);
// T,iterations,key_combination_ns,inclusion_check_ns,sig_verify_ns
std::string timing_csv(const BenchmarkReport& r);

}  // namespace blockpki::sim
