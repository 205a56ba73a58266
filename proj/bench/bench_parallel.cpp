// Parallel kernels against their serial references: Merkle level hashing and
// the independent-simulation campaign runner.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <omp.h>

#include "blockpki/merkle.hpp"
#include "blockpki/sim/benchmark.hpp"
#include "blockpki/sim/campaign.hpp"

using namespace blockpki;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t campaign_runs = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 32;
  std::printf("threads available: %d\n\n", omp_get_max_threads());

  std::printf("merkle build\n%10s %12s %12s %8s %6s\n", "leaves", "serial_ms", "parallel_ms", "speedup", "same");
  for (std::size_t n : {1000u, 10000u, 100000u, 1000000u}) {
    std::vector<Hash256> leaves;
    leaves.reserve(n);
    for (std::size_t i = 0; i < n; ++i) leaves.push_back(merkle::leaf_hash(to_bytes("tx-" + std::to_string(i))));
    const bool same = merkle::MerkleTree::build(leaves).root() == merkle::MerkleTree::build_serial(leaves).root();
    const double ser = best_ms(3, [&] { merkle::MerkleTree::build_serial(leaves); });
    const double par = best_ms(3, [&] { merkle::MerkleTree::build(leaves); });
    std::printf("%10zu %12.3f %12.3f %8.2f %6s\n", n, ser, par, ser / par, same ? "yes" : "NO");
  }

  std::printf("\nissuance campaign (T=5, %zu seeds)\n%12s %12s %8s %6s\n", campaign_runs, "serial_ms", "parallel_ms",
              "speedup", "same");
  sim::Scenario s = sim::with_threshold(sim::Scenario{}, 5);
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < campaign_runs; ++i) seeds.push_back(1000 + i);
  std::vector<sim::CampaignRow> ser_rows, par_rows;
  const double ser = best_ms(1, [&] { ser_rows = sim::run_campaign_serial(s, seeds); });
  const double par = best_ms(1, [&] { par_rows = sim::run_campaign(s, seeds); });
  const bool same = sim::metrics_csv(ser_rows) == sim::metrics_csv(par_rows);
  std::printf("%12.3f %12.3f %8.2f %6s\n", ser, par, ser / par, same ? "yes" : "NO");
  return same ? 0 : 1;
}
