#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <cuckoo/binomial.hpp>

using namespace cuckoo;

TEST_CASE("upper tail matches an exact rational computation", "[binomial]") {
  // P(Bin(16, 1/16) >= 2), worked out in integer arithmetic:
  //   numerator 4872033471902910991, denominator 16^16 = 2^64
  namespace mp = boost::multiprecision;
  const mp::cpp_rational exact = exact_binomial_upper_tail(16, 1, 16, 2);
  CHECK(mp::numerator(exact) == mp::cpp_int("4872033471902910991"));
  CHECK(mp::denominator(exact) == mp::cpp_int("18446744073709551616"));

  const double expected = 0.2641134637329616;
  CHECK(exact.convert_to<double>() == Catch::Approx(expected).epsilon(1e-15));
  CHECK(binomial_upper_tail(16, 1.0 / 16.0, 2) ==
        Catch::Approx(expected).epsilon(1e-13));
  CHECK(binomial_lower_tail(16, 1.0 / 16.0, 1) ==
        Catch::Approx(1.0 - expected).epsilon(1e-13));
}

TEST_CASE("double tails agree with exact rationals across small n", "[binomial]") {
  for (unsigned n : {1u, 5u, 16u, 40u, 64u}) {
    for (std::uint64_t b : {7ull, 16ull, 100ull}) {
      const double p = 1.0 / static_cast<double>(b);
      for (unsigned k = 0; k <= n; ++k) {
        const double exact =
            exact_binomial_upper_tail(n, 1, b, k).convert_to<double>();
        const double approx = binomial_upper_tail(n, p, k);
        if (exact > 1e-300) {
          REQUIRE(approx == Catch::Approx(exact).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("tails are complementary", "[binomial]") {
  for (std::uint64_t n : {3ull, 16ull, 100ull, 1000ull}) {
    for (double p : {1e-6, 0.01, 0.3, 0.5, 0.9}) {
      for (std::uint64_t k = 0; k <= n; k += (n > 50 ? 13 : 1)) {
        const double up = binomial_upper_tail(n, p, k + 1);
        const double lo = binomial_lower_tail(n, p, k);
        REQUIRE(up + lo == Catch::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("tail edge cases", "[binomial]") {
  CHECK(binomial_upper_tail(10, 0.3, 0) == 1.0);
  CHECK(binomial_upper_tail(10, 0.3, 11) == 0.0);
  CHECK(binomial_upper_tail(10, 0.0, 1) == 0.0);
  CHECK(binomial_upper_tail(10, 0.0, 0) == 1.0);
  CHECK(binomial_upper_tail(10, 1.0, 10) == 1.0);
  CHECK(binomial_lower_tail(10, 0.3, 10) == 1.0);
  CHECK(binomial_lower_tail(10, 1.0, 9) == 0.0);
  CHECK(binomial_lower_tail(10, 0.0, 0) == 1.0);
  // deep tail stays finite and positive in log space
  const double lg = log_binomial_upper_tail(1000000, 1e-12, 10);
  CHECK(std::isfinite(lg));
  CHECK(lg < -100.0);
}

TEST_CASE("tails are monotone", "[binomial]") {
  // non-increasing in k, non-decreasing in p
  double prev = 1.0;
  for (std::uint64_t k = 0; k <= 50; ++k) {
    const double v = binomial_upper_tail(50, 0.2, k);
    REQUIRE(v <= prev + 1e-15);
    prev = v;
  }
  prev = 0.0;
  for (double p : {0.01, 0.05, 0.1, 0.3, 0.6, 0.9}) {
    const double v = binomial_upper_tail(50, p, 10);
    REQUIRE(v >= prev);
    prev = v;
  }
}

TEST_CASE("exact_binomial_upper_tail rejects bad fractions", "[binomial]") {
  CHECK_THROWS_AS(exact_binomial_upper_tail(5, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(exact_binomial_upper_tail(5, 3, 2, 1), std::invalid_argument);
  CHECK(exact_binomial_upper_tail(5, 1, 2, 6) == 0);
  CHECK(exact_binomial_upper_tail(5, 1, 2, 0) == 1);
}

TEST_CASE("pinned overload probability uses the per-bucket pin rate",
          "[binomial]") {
  // d + s + 1 items must hit one bucket with both hashes; each item does so
  // with probability 1/m^2
  CHECK(pinned_overload_probability(16, 4, 1, 0) ==
        Catch::Approx(0.2641134637329616).epsilon(1e-13));
  const Params p = derive_params(100, 0.25, 1, 0);
  CHECK(pinned_overload_probability(p) ==
        Catch::Approx(binomial_upper_tail(100, 1.0 / (125.0 * 125.0), 2))
            .epsilon(1e-15));
  CHECK(expected_overloaded_buckets(p) ==
        Catch::Approx(125.0 * pinned_overload_probability(p)).epsilon(1e-15));
  CHECK_THROWS_AS(log_pinned_overload_probability(10, 0, 1, 0),
                  std::invalid_argument);
}

TEST_CASE("overload probability decays with d and s", "[binomial]") {
  const double base = pinned_overload_probability(1000, 1250, 1, 0);
  CHECK(pinned_overload_probability(1000, 1250, 2, 0) < base);
  CHECK(pinned_overload_probability(1000, 1250, 1, 1) < base);
  CHECK(pinned_overload_probability(1000, 1250, 1, 1) ==
        Catch::Approx(pinned_overload_probability(1000, 1250, 2, 0))
            .epsilon(1e-12));  // only d + s matters
}
