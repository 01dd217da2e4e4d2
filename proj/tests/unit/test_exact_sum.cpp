#include "carbonsched/exact_sum.hpp"

#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "per_request_oracle.hpp"

using carbonsched::ExactSum;

TEST_SUITE("exact_sum") {
  TEST_CASE("cancellation that defeats naive summation") {
    ExactSum s;
    for (double x : {1e100, 1.0, -1e100, 1e-100}) s.add(x);
    CHECK(s.value() == 1.0 + 1e-100);
  }

  TEST_CASE("matches 1024-bit MPFR on random magnitudes, any order") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> exp(-40, 40);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> xs(50);
      for (auto& x : xs) x = std::ldexp(mant(rng), exp(rng));
      oracle::BigSum big;
      ExactSum fwd;
      for (double x : xs) {
        big.add(x);
        fwd.add(x);
      }
      std::shuffle(xs.begin(), xs.end(), rng);
      ExactSum shuffled;
      for (double x : xs) shuffled.add(x);
      CHECK(fwd.value() == big.value());
      CHECK(shuffled.value() == fwd.value());
    }
  }

  TEST_CASE("add_product keeps the exact product") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> g(1e-6, 1e-4);
    for (int trial = 0; trial < 30; ++trial) {
      oracle::BigSum big;
      ExactSum s;
      for (int i = 0; i < 20; ++i) {
        const double x = g(rng);
        const auto n = static_cast<double>(rng() % 10000);
        s.add_product(n, x);
        for (int k = 0; k < static_cast<int>(n); ++k) big.add(x);
      }
      CHECK(s.value() == big.value());
    }
  }
}
