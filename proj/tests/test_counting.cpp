#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "phad/counting.hpp"
#include "phad/parallel.hpp"
#include "phad/rng.hpp"

using namespace phad;

namespace {

// Row-by-row oracle: picks each row from all 2^s words and keeps it only if
// orthogonal to the rows already chosen.
std::uint64_t count_rows_oracle(int n, int s) {
  const std::uint64_t words = std::uint64_t{1} << s;
  std::vector<std::uint64_t> rows;
  std::uint64_t total = 0;
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      ++total;
      return;
    }
    for (std::uint64_t w = 0; w < words; ++w) {
      bool ok = true;
      for (auto r : rows)
        if (2 * std::popcount(r ^ w) != s) {
          ok = false;
          break;
        }
      if (!ok) continue;
      rows.push_back(w);
      self(self, depth + 1);
      rows.pop_back();
    }
  };
  rec(rec, 0);
  return total;
}

BigCount central_binomial_closed_form(unsigned k) { return pow2(2 * k) * binomial(2 * k, k); }

}  // namespace

TEST(BruteForce, Examples) {
  for (int s = 0; s <= 10; ++s) EXPECT_EQ(count_bruteforce(1, s), pow2(static_cast<unsigned>(s)));
  EXPECT_EQ(count_bruteforce(2, 2), 8);
  EXPECT_EQ(count_bruteforce(3, 3), 0);
  EXPECT_THROW(count_bruteforce(3, 9), CapExceeded);
}

TEST(BruteForce, MatchesRowOracle) {
  for (int n = 1; n <= 5; ++n)
    for (int s = 0; n * s <= 20; ++s) EXPECT_EQ(count_bruteforce(n, s), BigCount(count_rows_oracle(n, s))) << n << "," << s;
}

TEST(CountDp, Examples) {
  EXPECT_EQ(count_dp(2, 4), 96);
  EXPECT_EQ(count_dp(3, 4), 384);
  EXPECT_EQ(count_dp(4, 4), 768);
  EXPECT_EQ(count_dp(5, 0), 1);
  EXPECT_EQ(count_dp(1, 7), 128);
}

TEST(CountDp, EqualsBruteForceForSmallProducts) {
  for (int n = 1; n <= 24; ++n)
    for (int s = 0; n * s <= 24; ++s) ASSERT_EQ(count_dp(n, s), count_bruteforce(n, s)) << n << "," << s;
}

TEST(CountDp, VanishesOffDivisibility) {
  for (int n = 2; n <= 5; ++n)
    for (int s = 1; s <= 10; ++s) {
      const bool must_vanish = (s % 2 == 1) || (n >= 3 && s % 4 != 0);
      if (must_vanish) {
        EXPECT_EQ(count_dp(n, s), 0) << n << "," << s;
      }
    }
}

TEST(CountDp, TwoRowClosedForm) {
  for (unsigned k = 0; k <= 16; ++k) EXPECT_EQ(count_dp(2, static_cast<int>(2 * k)), central_binomial_closed_form(k));
}

TEST(CountDp, IndependentOfJobs) {
  const BigCount one = count_dp(5, 8, 1);
  EXPECT_EQ(count_dp(5, 8, 3), one);
  EXPECT_EQ(count_dp(5, 8, 8), one);
}

TEST(CountDp, RefusesOverBudget) {
  CountLimits lim;
  lim.dp_state_budget = 100;
  EXPECT_THROW(count_dp(5, 8, 1, lim), CapExceeded);
  try {
    count_dp(5, 8, 1, lim);
  } catch (const CapExceeded& e) {
    EXPECT_EQ(e.reason(), "dp_state_budget");
  }
}

TEST(MeetMiddle, AgreesWithDp) {
  for (int n = 1; n <= 4; ++n)
    for (int s = 0; s <= 12; s += 2) EXPECT_EQ(count_meet_middle(n, s), count_dp(n, s)) << n << "," << s;
  EXPECT_EQ(count_meet_middle(2, 8), 17920);
  EXPECT_EQ(count_meet_middle(1, 2), 4);
  EXPECT_THROW(count_meet_middle(3, 5), std::invalid_argument);
}

TEST(WalkTable, MassRangeAndSymmetry) {
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k <= 5; ++k) {
      const auto t = walk_table(n, k);
      EXPECT_EQ(t.total_mass(), pow2(static_cast<unsigned>(n * k)));
      EXPECT_TRUE(t.keys_in_range());
    }
  EXPECT_TRUE(walk_table(2, 5).is_symmetric());
  // A step image has product +1 on every triangle; its negation does not.
  EXPECT_FALSE(walk_table(3, 1).is_symmetric());
  EXPECT_FALSE(walk_table(3, 2).is_symmetric());
  EXPECT_EQ(walk_table(3, 1).count_at({1, 1, 1}), 2);
  EXPECT_EQ(walk_table(3, 1).count_at({-1, -1, -1}), 0);
}

TEST(Witnesses, RowAndColumnNegationPreserveOrthogonality) {
  // Collect 4 x 8 witnesses by brute force and apply sign changes.
  const int n = 4, s = 8;
  const std::uint64_t mask = (1U << s) - 1;
  auto orthogonal = [&](const std::vector<std::uint64_t>& rows) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (2 * std::popcount(rows[static_cast<std::size_t>(i)] ^ rows[static_cast<std::size_t>(j)]) != s) return false;
    return true;
  };
  Philox4x32 rng(61, 0);
  int found = 0;
  while (found < 200) {
    std::vector<std::uint64_t> rows(n);
    for (auto& r : rows) r = rng.next_u64() & mask;
    if (!orthogonal(rows)) continue;
    ++found;
    auto flipped_row = rows;
    flipped_row[rng.below(n)] ^= mask;
    EXPECT_TRUE(orthogonal(flipped_row));
    auto flipped_col = rows;
    const std::uint64_t col = std::uint64_t{1} << rng.below(s);
    for (auto& r : flipped_col) r ^= col;
    EXPECT_TRUE(orthogonal(flipped_col));
  }
}

TEST(LogCount, LeadingBitsAreAccurate) {
  EXPECT_TRUE(std::isinf(log_e(BigCount(0))));
  EXPECT_NEAR(log_e(BigCount(96)), std::log(96.0), 1e-15);
  const BigCount big = pow2(3000) * 3;
  EXPECT_NEAR(log2_count(big), 3000 + std::log2(3.0), 1e-12);
  const BigCount n = count_meet_middle(3, 32);
  EXPECT_NEAR(log_e(n), std::log(n.convert_to<double>()), 1e-13);
}

TEST(Asymptotic, Examples) {
  const auto a2 = asymptotic_scale(2, 1);
  EXPECT_NEAR(a2.A(), 512 / std::sqrt(8 * std::numbers::pi), 1e-10);
  EXPECT_NEAR(a2.A(), 102.13, 0.01);
  const auto a3 = asymptotic_scale(3, 1);
  EXPECT_NEAR(a3.A(), 65536 / std::pow(8 * std::numbers::pi, 1.5), 1e-9);
  EXPECT_NEAR(a3.A(), 520.1, 0.1);
  for (std::uint64_t t = 1; t <= 5; ++t) {
    const auto a = asymptotic_scale(3, t);
    EXPECT_DOUBLE_EQ(a.correction, 1.0 / (8.0 * static_cast<double>(t)));
    EXPECT_TRUE(a.core_scale_holds);
    // K_n F equals A_hat exactly.
    EXPECT_NEAR(a.log_K + std::log(a.F), a.log_A_hat, 1e-12);
  }
  EXPECT_THROW(asymptotic_scale(3, 0), std::invalid_argument);
}

TEST(CoreMass, Examples) {
  const auto m = core_gaussian_mass(3, 2);
  EXPECT_NEAR(m.F, std::pow(std::numbers::pi / 4, 1.5), 1e-15);
  EXPECT_NEAR(m.F, 0.6960, 1e-4);
  EXPECT_GE(core_gaussian_mass(3, 1).ratio_to_F, 0.859);
  for (int d = 1; d <= 200; ++d) EXPECT_TRUE(core_gaussian_mass(d, 1).holds) << d;
  EXPECT_GT(core_gaussian_mass(100, 1).ratio_to_F, core_gaussian_mass(3, 1).ratio_to_F);
}

TEST(CoreMass, OneDimensionalQuadrature) {
  const double t = 1.0;
  const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) { return std::exp(-2 * t * x * x); }, -1.0, 1.0, 15, 1e-14);
  EXPECT_NEAR(core_gaussian_mass(1, t).G_core, q, 1e-10);
}

TEST(RadialMoment, Examples) {
  const auto m0 = gaussian_radial_moment(5, 2, 0);
  EXPECT_NEAR(m0.exact, gaussian_mass_F(5, 2), 1e-15);
  EXPECT_NEAR(m0.bound_ratio, 1.0, 1e-15);
  const auto m1 = gaussian_radial_moment(5, 2, 1);
  EXPECT_NEAR(m1.exact, gaussian_mass_F(5, 2) * 5 / 8, 1e-15);
  EXPECT_NEAR(m1.bound_ratio, 0.25, 1e-15);
  const auto m2 = gaussian_radial_moment(3, 1, 2);
  EXPECT_NEAR(m2.exact, gaussian_mass_F(3, 1) * 15 / 16, 1e-15);
  EXPECT_NEAR(m2.bound_ratio, 15.0 / 144, 1e-15);
  EXPECT_TRUE(m2.holds);
}

TEST(RadialMoment, MatchesMonteCarloChiSquare) {
  // E[s^m] under N(0, 1/(4t)) coordinates times F.
  const int d = 4;
  const double t = 1.5;
  SampleStats s2;
  for (std::uint64_t i = 0; i < 400000; ++i) {
    Philox4x32 rng(62, i);
    double s = 0;
    for (int k = 0; k < d; ++k) {
      const double z = rng.normal() / std::sqrt(4 * t);
      s += z * z;
    }
    s2.add(s * s);
  }
  const double f = gaussian_mass_F(d, t);
  EXPECT_NEAR(gaussian_radial_moment(d, t, 2).exact / f, s2.mean(), 4 * s2.std_error());
}
