#include <catch2/catch_amalgamated.hpp>

#include <cuckoo/params.hpp>

using namespace cuckoo;

TEST_CASE("derive_params computes the bucket count", "[params]") {
  CHECK(derive_params(100, 0.25, 1, 0).m == 125);
  CHECK(derive_params(1, 0.25, 1, 0).m == 2);
  CHECK(derive_params(1000, 0.25, 4, 2).m == 313);  // ceil(312.5)
  CHECK(derive_params(8, 0.25, 1, 0).m == 10);      // exact product, no bump
  CHECK(derive_params(64, 0.25, 1, 0).m == 80);
  CHECK(derive_params(3, 0.25, 2, 1).m == 2);
  CHECK(derive_params(1, 0.5, 8, 0).m == 1);
}

TEST_CASE("derive_params copies the inputs through", "[params]") {
  const Params p = derive_params(256, 0.25, 3, 2);
  CHECK(p.n == 256);
  CHECK(p.epsilon == 0.25);
  CHECK(p.d == 3);
  CHECK(p.s == 2);
  CHECK(p.m == 107);  // ceil(1.25*256/3)
}

TEST_CASE("derive_params rejects degenerate geometry", "[params]") {
  CHECK_THROWS_AS(derive_params(0, 0.25, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(derive_params(10, 0.0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(derive_params(10, -0.5, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(derive_params(10, 0.25, 0, 0), std::invalid_argument);
}

TEST_CASE("capacity never falls below the target ratio", "[params]") {
  for (std::uint64_t n : {1ull, 7ull, 100ull, 999ull, 12345ull}) {
    for (double eps : {0.01, 0.25, 1.0, 1.5}) {
      for (std::uint32_t d : {1u, 2u, 3u, 8u}) {
        const Params p = derive_params(n, eps, d, 0);
        // m*d >= (1+eps)*n up to the snapping tolerance
        CHECK(static_cast<double>(p.m) * d >= (1.0 + eps) * static_cast<double>(n) - 1e-6);
        CHECK(p.load_capacity() <= 1.0 / (1.0 + eps) + 1e-9);
      }
    }
  }
}
