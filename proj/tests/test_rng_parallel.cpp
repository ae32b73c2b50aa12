#include <gtest/gtest.h>

#include <cmath>

#include "phad/parallel.hpp"
#include "phad/rng.hpp"

using namespace phad;

TEST(Philox, KnownAnswerVectors) {
  const auto zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero, (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  const auto ones = Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff});
  EXPECT_EQ(ones, (std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  Philox4x32 a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
  }
}

TEST(Philox, UniformAndNormalMoments) {
  Philox4x32 r(1, 0);
  SampleStats u, g, g2;
  for (int i = 0; i < 200000; ++i) {
    const double x = r.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    u.add(x);
    const double z = r.normal();
    g.add(z);
    g2.add(z * z);
  }
  EXPECT_NEAR(u.mean(), 0.5, 4 * u.std_error());
  EXPECT_NEAR(g.mean(), 0.0, 4 * g.std_error());
  EXPECT_NEAR(g2.mean(), 1.0, 4 * g2.std_error());
}

TEST(Philox, BelowIsInRange) {
  Philox4x32 r(2, 0);
  std::array<int, 5> hist{};
  for (int i = 0; i < 50000; ++i) {
    const auto k = r.below(5);
    ASSERT_LT(k, 5U);
    ++hist[k];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(CompensatedSum, RecoversSmallTerms) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000000; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-10, 1e-20);
}

TEST(ChunkedReduce, IdenticalAcrossWorkerCounts) {
  auto run = [](unsigned jobs) {
    return chunked_reduce<SampleStats>(
        100000, jobs,
        [](std::uint64_t b, std::uint64_t e) {
          SampleStats s;
          for (auto i = b; i < e; ++i) s.add(Philox4x32(99, i).normal());
          return s;
        },
        [](SampleStats& a, const SampleStats& p) { a.merge(p); });
  };
  const auto one = run(1);
  for (unsigned j : {2U, 3U, 8U}) {
    const auto other = run(j);
    EXPECT_EQ(one.mean(), other.mean());
    EXPECT_EQ(one.variance(), other.variance());
  }
}

TEST(ChunkedReduce, PropagatesExceptions) {
  auto body = [](std::uint64_t b, std::uint64_t) -> int {
    if (b >= 8192) throw std::runtime_error("boom");
    return 1;
  };
  EXPECT_THROW(chunked_reduce<int>(20000, 4, body, [](int& a, int p) { a += p; }), std::runtime_error);
}
