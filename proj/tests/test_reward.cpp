#include <doctest.h>

#include <cmath>

#include "rabinrl/errors.hpp"
#include "rabinrl/reward.hpp"
#include "rabinrl/rng.hpp"
#include "test_util.hpp"

using namespace rabinrl;

namespace {

RewardScheme scheme_for(double c, std::vector<int> b, std::vector<int> cset,
                        int n = 8, OverlapPolicy pol = OverlapPolicy::CWins) {
  RabinPair pair;
  pair.inf = std::move(b);
  pair.fin = std::move(cset);
  return RewardScheme(c, n, pair, pol);
}

} // namespace

TEST_CASE("scheme: ordering and limit ratios across the c grid") {
  for (double c : {0.5, 0.1, 0.01, 0.001}) {
    RewardScheme s = scheme_for(c, {0}, {1});
    CHECK(0.0 < s.gamma_c());
    CHECK(s.gamma_c() < s.gamma_b());
    CHECK(s.gamma_b() < s.gamma());
    CHECK(s.gamma() < 1.0);
    // 1 - gamma recovers c^3 only up to the spacing of doubles near 1,
    // so the ratio carries a ~1e-10 representation error at c = 0.001.
    CHECK(std::abs((1.0 - s.gamma()) / (1.0 - s.gamma_b()) - c) <= 1e-9);
    CHECK(std::abs((1.0 - s.gamma_b()) / (1.0 - s.gamma_c()) - c) <= 1e-9);
  }
  // Both ratios decrease toward 0 along the grid.
  double prev = 1.0;
  for (double c : {0.5, 0.1, 0.01, 0.001}) {
    RewardScheme s = scheme_for(c, {0}, {1});
    double ratio = (1.0 - s.gamma()) / (1.0 - s.gamma_b());
    CHECK(ratio < prev);
    prev = ratio;
  }
  CHECK_THROWS_AS(scheme_for(0.0, {0}, {1}), input_error);
  CHECK_THROWS_AS(scheme_for(1.0, {0}, {1}), input_error);
}

TEST_CASE("scheme: the case-study parameterization") {
  RewardScheme s = scheme_for(0.01, {0}, {1});
  CHECK(s.reward(0) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(s.reward(2) == 0.0);
  CHECK(s.discount(1) == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(s.discount(0) == doctest::Approx(0.9999).epsilon(1e-15));
  CHECK(s.discount(2) == doctest::Approx(0.999999).epsilon(1e-15));

  RewardScheme half = scheme_for(0.5, {0}, {1});
  CHECK(half.reward(0) == 0.25);
}

TEST_CASE("path_return: zeros, geometric runs, and a C-B path") {
  RewardScheme s = scheme_for(0.5, {1}, {2}, 4);

  std::vector<int> neutral{0, 3, 0, 3, 0};
  CHECK(s.path_return(neutral) == 0.0);

  for (int n : {1, 2, 5, 17}) {
    std::vector<int> bs(n, 1);
    double expect = 1.0 - std::pow(s.gamma_b(), n);
    CHECK(std::abs(s.path_return(bs) - expect) <= 1e-12);
  }

  std::vector<int> cb{2, 1};
  CHECK(s.path_return(cb) == 0.125); // gamma_c * (1 - gamma_b) exactly
}

TEST_CASE("path_return: recursion is exact and the bounds hold") {
  Rng rng(3);
  for (double c : {0.5, 0.1, 0.01}) {
    RewardScheme s = scheme_for(c, {0, 5}, {1, 6});
    for (int trial = 0; trial < 500; ++trial) {
      int len = 1 + rng.below_int(40);
      std::vector<int> path(len);
      for (int &x : path)
        x = rng.below_int(8);
      double g0 = s.path_return(path);
      double g1 = s.path_return(std::span<const int>(path).subspan(1));
      CHECK(g0 == s.reward(path[0]) + s.discount(path[0]) * g1);
      CHECK(g0 >= 0.0);
      CHECK(g0 <= 1.0);
      CHECK(s.gamma_c() * g1 <= s.gamma() * g1 + 1e-12);
      CHECK(s.gamma_c() * g1 <= g0 + 1e-12);
      // gamma * G_{t+1} <= G_t requires sigma[t] outside C (a C-state
      // discounts harder than gamma).
      if (!s.in_c(path[0]))
        CHECK(s.gamma() * g1 <= g0 + 1e-12);
      CHECK(g0 <= 1.0 - s.gamma_b() + s.gamma_b() * g1 + 1e-12);
    }
  }
}

TEST_CASE("overlap policies") {
  CHECK_THROWS_AS(scheme_for(0.1, {0}, {0}, 4, OverlapPolicy::Error),
                  input_error);
  RewardScheme cwins = scheme_for(0.1, {0}, {0}, 4, OverlapPolicy::CWins);
  CHECK(cwins.reward(0) == 0.0);
  CHECK(cwins.discount(0) == cwins.gamma_c());
  RewardScheme bwins = scheme_for(0.1, {0}, {0}, 4, OverlapPolicy::BWins);
  CHECK(bwins.reward(0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(bwins.discount(0) == bwins.gamma_b());
}
