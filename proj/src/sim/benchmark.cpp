#include "blockpki/sim/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

#include "blockpki/error.hpp"
#include "blockpki/merkle.hpp"

namespace blockpki::sim {

namespace {

using Clock = std::chrono::steady_clock;

// Keeps the optimizer from discarding timed results.
volatile std::size_t g_sink = 0;

template <typename F>
double median_ns(std::size_t iterations, F&& f) {
  std::vector<double> samples;
  samples.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto t0 = Clock::now();
    g_sink = g_sink + f();
    const auto t1 = Clock::now();
    samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
  }
  return median(std::move(samples));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidParams, "linear fit needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw Error(ErrorCode::InvalidParams, "linear fit needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

TimingRow time_verification(const crypto::GroupParams& params, std::size_t threshold, std::size_t iterations,
                            std::uint64_t seed) {
  if (threshold == 0) throw Error(ErrorCode::InvalidParams, "threshold must be positive");
  const std::string m = R"({"issuers":[],"notAfter":1700000000,"notBefore":1690000000,)"
                        R"("publicKey":"02aa","subjectName":"www.example.com"})";
  std::vector<crypto::KeyPair> keys;
  std::vector<crypto::GroupElement> pubs;
  for (std::size_t i = 0; i < threshold; ++i) {
    keys.push_back(crypto::keygen(params, to_bytes("bench/" + std::to_string(seed) + "/" + std::to_string(i))));
    pubs.push_back(keys.back().public_key);
  }
  std::vector<crypto::NoncePair> nonces;
  std::vector<crypto::GroupElement> pub_nonces;
  for (const auto& k : keys) {
    nonces.push_back(crypto::gen_nonce(params, k, as_view(m)));
    pub_nonces.push_back(nonces.back().public_nonce());
  }
  const crypto::Scalar e = crypto::challenge(params, crypto::combine_nonces(params, pub_nonces), as_view(m));
  std::vector<crypto::PartialSignature> partials;
  for (std::size_t i = 0; i < threshold; ++i)
    partials.push_back(crypto::partial_sign(params, "S" + std::to_string(i), keys[i], nonces[i], e));
  const crypto::MultiSignature sig = crypto::combine_partials(params, partials, e);
  const crypto::GroupElement q_bar = crypto::combine_keys(params, pubs);
  if (!crypto::verify_multisig(params, sig, q_bar, as_view(m)))
    throw Error(ErrorCode::InvalidParams, "benchmark signature does not verify");

  // The certificate tx shares its block with ten other transactions.
  std::vector<Hash256> leaves;
  for (int i = 0; i < 10; ++i) leaves.push_back(merkle::leaf_hash(to_bytes("other-tx-" + std::to_string(i))));
  leaves.insert(leaves.begin() + 5, merkle::leaf_hash(as_view(m)));
  const merkle::MerkleTree tree = merkle::MerkleTree::build(leaves);
  const merkle::InclusionProof proof = tree.prove(5);
  const Hash256 root = tree.root();
  const Hash256 leaf = leaves[5];

  TimingRow row;
  row.threshold = threshold;
  row.iterations = iterations;
  row.key_combination_ns = median_ns(iterations, [&] { return crypto::combine_keys(params, pubs).encoding.size(); });
  row.inclusion_check_ns =
      median_ns(iterations, [&] { return std::size_t{merkle::verify_inclusion(root, leaf, proof)}; });
  row.sig_verify_ns =
      median_ns(iterations, [&] { return std::size_t{crypto::verify_multisig(params, sig, q_bar, as_view(m))}; });
  return row;
}

ThresholdRow summarize(std::size_t threshold, const std::vector<CampaignRow>& rows) {
  ThresholdRow out;
  out.threshold = threshold;
  out.runs = rows.size();
  std::vector<double> blocks, secs;
  double tx = 0, gas = 0, creation = 0, renewal = 0;
  std::size_t renewals = 0;
  for (const auto& r : rows) {
    if (!r.success) continue;
    ++out.successes;
    blocks.push_back(static_cast<double>(r.metrics.blocks_elapsed));
    secs.push_back(r.metrics.sim_seconds);
    tx += static_cast<double>(r.metrics.tx_count);
    gas += static_cast<double>(r.metrics.total_gas);
    creation += static_cast<double>(r.metrics.setup_gas);
    for (const auto& t : r.metrics.per_tx)
      if (t.kind != "createDomainContract" && t.gas_used >= r.metrics.setup_gas) out.creation_most_expensive = false;
    if (r.renewal) {
      renewal += static_cast<double>(r.renewal->total_gas - r.renewal->setup_gas);
      ++renewals;
    }
  }
  if (out.successes) {
    const double n = static_cast<double>(out.successes);
    out.mean_blocks = std::accumulate(blocks.begin(), blocks.end(), 0.0) / n;
    out.median_blocks = median(blocks);
    out.mean_sim_seconds = std::accumulate(secs.begin(), secs.end(), 0.0) / n;
    out.median_sim_seconds = median(secs);
    out.tx_count = tx / n;
    out.total_gas = gas / n;
    out.creation_gas = creation / n;
  }
  if (renewals) out.renewal_gas = renewal / static_cast<double>(renewals);
  return out;
}

BenchmarkReport run_benchmark(const Scenario& base, const BenchmarkOptions& options) {
  BenchmarkReport report;
  report.seed = options.seed;
  report.repetitions = options.repetitions;
  std::vector<std::uint64_t> seeds;
  for (std::size_t r = 0; r < options.repetitions; ++r) seeds.push_back(options.seed + r);

  std::vector<double> xs, ys;
  for (std::size_t t : options.thresholds) {
    Scenario s = with_threshold(base, t);
    // Per-CA behaviors do not carry over between thresholds; every CA is honest.
    s.behaviors.clear();
    s.validate();
    auto rows = options.parallel ? run_campaign(s, seeds, options.renewal)
                                 : run_campaign_serial(s, seeds, options.renewal);
    const ThresholdRow row = summarize(t, rows);
    for (const auto& r : rows) {
      if (!r.success) continue;
      xs.push_back(static_cast<double>(t));
      ys.push_back(static_cast<double>(r.metrics.total_gas));
    }
    report.rows.push_back(row);
    report.runs.insert(report.runs.end(), rows.begin(), rows.end());
  }
  if (xs.size() >= 2) report.gas_fit = linear_fit(xs, ys);

  const crypto::GroupParams params = crypto::GroupParams::with_sha256(crypto::group_by_name(base.group));
  for (std::size_t t : options.thresholds)
    report.timing.push_back(time_verification(params, t, options.timing_iterations, options.seed));
  return report;
}

Json to_json(const BenchmarkReport& r) {
  Json rows = Json::array();
  for (const auto& t : r.rows)
    rows.push_back({{"T", t.threshold},
                    {"runs", t.runs},
                    {"successes", t.successes},
                    {"mean_blocks_elapsed", t.mean_blocks},
                    {"median_blocks_elapsed", t.median_blocks},
                    {"mean_sim_seconds", t.mean_sim_seconds},
                    {"median_sim_seconds", t.median_sim_seconds},
                    {"tx_count", t.tx_count},
                    {"total_gas", t.total_gas},
                    {"creation_gas", t.creation_gas},
                    {"renewal_gas", t.renewal_gas},
                    {"creation_most_expensive", t.creation_most_expensive}});
  Json timing = Json::array();
  for (const auto& t : r.timing)
    timing.push_back({{"T", t.threshold},
                      {"iterations", t.iterations},
                      {"key_combination_ns", t.key_combination_ns},
                      {"inclusion_check_ns", t.inclusion_check_ns},
                      {"sig_verify_ns", t.sig_verify_ns}});
  return Json{{"seed", r.seed},
              {"repetitions", r.repetitions},
              {"thresholds", rows},
              {"verification_timing", timing},
              {"gas_fit", {{"slope", r.gas_fit.slope}, {"intercept", r.gas_fit.intercept}, {"r2", r.gas_fit.r2}}}};
}

std::string threshold_csv(const BenchmarkReport& r) {
  std::string out = "T,runs,successes,mean_blocks,median_blocks,mean_sim_seconds,tx_count,total_gas,creation_gas,renewal_gas\n";
  for (const auto& t : r.rows)
    out += std::to_string(t.threshold) + "," + std::to_string(t.runs) + "," + std::to_string(t.successes) + "," +
           fmt(t.mean_blocks) + "," + fmt(t.median_blocks) + "," + fmt(t.mean_sim_seconds) + "," + fmt(t.tx_count) +
           "," + fmt(t.total_gas) + "," + fmt(t.creation_gas) + "," + fmt(t.renewal_gas) + "\n";
  return out;
}

std::string timing_csv(const BenchmarkReport& r) {
  std::string out = "T,iterations,key_combination_ns,inclusion_check_ns,sig_verify_ns\n";
  for (const auto& t : r.timing)
    out += std::to_string(t.threshold) + "," + std::to_string(t.iterations) + "," + fmt(t.key_combination_ns) + "," +
           fmt(t.inclusion_check_ns) + "," + fmt(t.sig_verify_ns) + "\n";
  return out;
}

}  // namespace blockpki::sim
