#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "blockpki/error.hpp"
#include "blockpki/sim/benchmark.hpp"

using namespace blockpki;
using namespace blockpki::sim;

TEST_CASE("linear fit against hand-computed values") {
  // y = 3x + 1 exactly.
  const LinearFit exact = linear_fit({2, 5, 10, 20}, {7, 16, 31, 61});
  CHECK(exact.slope == doctest::Approx(3));
  CHECK(exact.intercept == doctest::Approx(1));
  CHECK(exact.r2 == doctest::Approx(1));

  // x = 1,2,3, y = 1,3,2: slope 0.5, intercept 1, r^2 = 0.25.
  const LinearFit noisy = linear_fit({1, 2, 3}, {1, 3, 2});
  CHECK(noisy.slope == doctest::Approx(0.5));
  CHECK(noisy.intercept == doctest::Approx(1));
  CHECK(noisy.r2 == doctest::Approx(0.25));

  CHECK_THROWS_AS(linear_fit({1}, {1}), Error);
  CHECK_THROWS_AS(linear_fit({2, 2}, {1, 3}), Error);
}

TEST_CASE("with_threshold keeps the scenario consistent") {
  Scenario s;
  for (std::size_t t : {1, 3, 9}) CHECK_NOTHROW(with_threshold(s, t).validate());
  CHECK(with_threshold(s, 9).num_cas == 9);
  s.first_t_mode = true;
  s.authorized = 6;
  s.num_cas = 6;
  const Scenario f = with_threshold(s, 7);
  CHECK(f.authorized == 9);
  CHECK(f.num_cas == 9);
  CHECK_NOTHROW(f.validate());
}

TEST_CASE("benchmark report on a small campaign") {
  BenchmarkOptions opt;
  opt.thresholds = {2, 3};
  opt.repetitions = 3;
  opt.timing_iterations = 20;
  opt.seed = 4;
  Scenario base;
  base.chain.confirmation_depth = 0;
  const BenchmarkReport serial = [&] {
    BenchmarkOptions o = opt;
    o.parallel = false;
    return run_benchmark(base, o);
  }();
  const BenchmarkReport parallel = run_benchmark(base, opt);

  REQUIRE(serial.rows.size() == 2);
  CHECK(threshold_csv(serial) == threshold_csv(parallel));
  for (const auto& row : serial.rows) {
    CHECK(row.successes == 3);
    CHECK(row.tx_count == doctest::Approx(2.0 * row.threshold + 2));
    CHECK(row.creation_most_expensive);
    CHECK(row.renewal_gas == doctest::Approx(row.total_gas - row.creation_gas));
  }
  // Each extra CA adds one nonce and one signature tx of fixed size.
  CHECK(serial.gas_fit.r2 == doctest::Approx(1.0));
  REQUIRE(serial.timing.size() == 2);
  CHECK(serial.timing[0].iterations == 20);
  CHECK(serial.timing[0].sig_verify_ns > 0);

  const Json j = to_json(serial);
  CHECK(j["thresholds"].size() == 2);
  CHECK(j["verification_timing"][1]["T"] == 3);
}
