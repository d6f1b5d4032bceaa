#include <chrono>
#include <cstdint>
#include <set>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pacshift/bits.hpp"
#include "pacshift/concepts.hpp"
#include "pacshift/distributions.hpp"
#include "pacshift/prg.hpp"

namespace pacshift {
namespace {

using Pair = std::pair<std::uint64_t, std::uint64_t>;

TEST(PrgTest, SpecShape) {
  const PrgSpec hash(PrgKind::hash, 12);
  EXPECT_EQ(hash.output_bits(), 24);
  EXPECT_FALSE(hash.insecure());
  EXPECT_TRUE(PrgSpec(PrgKind::test, 3).insecure());
  EXPECT_EQ(parse_prg_kind("test"), PrgKind::test);
  EXPECT_THROW(parse_prg_kind("aes"), InvalidArgument);
  EXPECT_THROW(PrgSpec(PrgKind::hash, 0), InvalidArgument);
}

// Reference outputs computed with Python's hashlib and an independent
// splitmix64, from the message layout documented in the README.
TEST(PrgTest, FrozenExpansions) {
  EXPECT_EQ(prg_expand(PrgSpec(PrgKind::hash, 16), 0x1234), (Pair{0xe6ff, 0xf8c0}));
  EXPECT_EQ(prg_expand(PrgSpec(PrgKind::test, 8), 0xA5), (Pair{0xf7, 0xd8}));
}

TEST(PrgTest, LengthDoubling) {
  for (int s : {1, 5, 16, 30}) {
    for (auto kind : {PrgKind::hash, PrgKind::test}) {
      const auto [g0, g1] = prg_expand(PrgSpec(kind, s), low_mask(s) / 3);
      EXPECT_LE(g0, low_mask(s));
      EXPECT_LE(g1, low_mask(s));
    }
  }
}

TEST(GgmTest, OneLevelTreeIsThePrg) {
  const PrgSpec prg(PrgKind::test, 1);
  for (std::uint64_t key = 0; key < 2; ++key) {
    const auto f = ggm_prf(1, word_to_bits(key, 1), prg);
    const auto [g0, g1] = prg_expand(prg, key);
    EXPECT_EQ(f(0), g0);
    EXPECT_EQ(f(1), g1);
  }
}

TEST(GgmTest, FrozenOutputs) {
  EXPECT_EQ(GgmPrf(16, 0xBEEF, PrgSpec(PrgKind::hash, 16))(0x1357), 0xb6e8u);
  EXPECT_EQ(GgmPrf(10, 0x2AB, PrgSpec(PrgKind::test, 10))(0x3C1), 0xbcu);
  EXPECT_EQ(GgmPrf(20, 12345, PrgSpec(PrgKind::hash, 20))(999999), 0x2754u);
}

TEST(GgmTest, KeyLengthMustMatch) {
  EXPECT_THROW(ggm_prf(4, Bits(3, 0), PrgSpec(PrgKind::test, 4)), InvalidArgument);
  EXPECT_THROW(ggm_prf(4, Bits(4, 0), PrgSpec(PrgKind::test, 5)), InvalidArgument);
  EXPECT_NO_THROW(ggm_prf(4, Bits(4, 1), PrgSpec(PrgKind::test, 4)));
}

TEST(GgmTest, Deterministic) {
  const GgmPrf f(12, 0x5A5, PrgSpec(PrgKind::hash, 12));
  const GgmPrf g(12, 0x5A5, PrgSpec(PrgKind::hash, 12));
  for (std::uint64_t x = 0; x < 200; ++x) EXPECT_EQ(f(x * 17), g(x * 17));
}

TEST(GgmTest, PrefixSharing) {
  const GgmPrf f(14, 0x1F0F, PrgSpec(PrgKind::test, 14));
  std::mt19937_64 engine(3);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t x = engine() & low_mask(14);
    const int u = static_cast<int>(uniform_below(engine, 15));
    // y agrees with x on the first u coordinates and differs at u + 1.
    std::uint64_t y = (engine() & low_mask(14) & ~low_mask(u)) | (x & low_mask(u));
    if (u < 14) y = (y & ~(std::uint64_t{1} << u)) | (~x & (std::uint64_t{1} << u));
    const auto tx = f.trace(x);
    const auto ty = f.trace(y);
    ASSERT_EQ(tx.size(), 15u);
    for (int level = 0; level <= u; ++level) EXPECT_EQ(tx[level], ty[level]);
    EXPECT_EQ(tx.back(), f(x));
  }
}

TEST(GgmTest, BatchMatchesPointwise) {
  for (auto kind : {PrgKind::hash, PrgKind::test}) {
    const GgmPrf f(16, 0xACE1, PrgSpec(kind, 16));
    std::mt19937_64 engine(9);
    std::vector<std::uint64_t> xs(3000);
    for (auto& x : xs) x = engine() & low_mask(16);
    xs[5] = xs[6];  // duplicates
    std::vector<std::uint64_t> out(xs.size());
    f.evaluate(xs, out);
    for (std::size_t i = 0; i < xs.size(); ++i) ASSERT_EQ(out[i], f(xs[i]));
  }
}

TEST(GgmTest, FirstBitUnbiasedAtN16) {
  const GgmPrf f(16, 0x9C3B, PrgSpec(PrgKind::hash, 16));
  const auto xs = Distribution::uniform_hypercube(16).sample_values(100000, Seed(41));
  std::vector<std::uint64_t> out(xs.size());
  f.evaluate(xs, out);
  std::uint64_t ones = 0;
  for (auto v : out) ones += v & 1U;
  EXPECT_NEAR(ones / 1e5, 0.5, oracle::three_sigma(0.5, 100000));
}

TEST(RandomFunctionClassTest, Memoized) {
  const auto cls = random_function_class(20, Seed(1));
  const Concept c = cls.get(42);
  for (std::uint64_t x = 0; x < 1000; ++x) EXPECT_EQ(c.at(x * 31), c.at(x * 31));
  // Keyed by (seed, id, x): a second handle on the same id agrees.
  const Concept again = cls.get(42);
  for (std::uint64_t x = 0; x < 1000; ++x) EXPECT_EQ(c.at(x), again.at(x));
}

TEST(RandomFunctionClassTest, ConcurrentFirstEvaluationsAgree) {
  const Concept c = random_function_class(16, Seed(2)).get(7);
  std::vector<std::vector<std::uint8_t>> seen(8, std::vector<std::uint8_t>(4096));
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < 8; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t x = 0; x < 4096; ++x) seen[t][x] = c.at(x) ? 1 : 0;
      });
    }
  }
  for (int t = 1; t < 8; ++t) EXPECT_EQ(seen[t], seen[0]);
}

TEST(RandomFunctionClassTest, AllSixteenFunctionsEquallyLikelyAtN2) {
  const auto cls = random_function_class(2, Seed(3));
  auto engine = Seed(4).engine();
  std::vector<std::uint64_t> counts(16, 0);
  for (int i = 0; i < 10000; ++i) {
    const Concept c = cls.get(cls.sample_index(engine));
    std::uint64_t table = 0;
    for (std::uint64_t x = 0; x < 4; ++x) table |= (c.at(x) ? 1U : 0U) << x;
    ++counts[table];
  }
  for (int t = 0; t < 16; ++t) EXPECT_NEAR(counts[t] / 1e4, 1.0 / 16, oracle::three_sigma(1.0 / 16, 10000)) << t;
}

TEST(RandomFunctionClassTest, DistinctIdsDisagreeOnHalf) {
  const auto cls = random_function_class(8, Seed(5));
  const auto a = cls.get(1).truth_table();
  const auto b = cls.get(2).truth_table();
  int disagree = 0;
  for (std::size_t x = 0; x < 256; ++x) disagree += a[x] != b[x] ? 1 : 0;
  EXPECT_NEAR(disagree, 128, 3 * 8);
}

TEST(FirstBitClassTest, MatchesGgmFirstOutputBit) {
  for (auto kind : {PrgKind::hash, PrgKind::test}) {
    const auto cls = first_bit_class(12, kind);
    EXPECT_EQ(cls.index_bits(), 12);
    EXPECT_EQ(cls.prg(), PrgSpec(kind, 12));
    std::mt19937_64 engine(6);
    for (int i = 0; i < 100; ++i) {
      const std::uint64_t j = engine() & low_mask(12);
      const std::uint64_t x = engine() & low_mask(12);
      EXPECT_EQ(cls.get(j)(Input(12, x)), (GgmPrf(12, j, PrgSpec(kind, 12))(x) & 1U) != 0);
    }
  }
}

TEST(FirstBitClassTest, IndexRangeChecked) {
  const auto cls = first_bit_class(6, PrgKind::test);
  EXPECT_NO_THROW(cls.get(63));
  EXPECT_THROW(cls.get(64), InvalidArgument);
}

TEST(FirstBitClassTest, EvaluationCostAtN20) {
  const auto cls = first_bit_class(20, PrgKind::hash);
  std::mt19937_64 engine(7);
  constexpr int kCalls = 2000;
  const auto start = std::chrono::steady_clock::now();
  int ones = 0;
  for (int i = 0; i < kCalls; ++i) ones += cls.get(engine() & low_mask(20)).at(engine() & low_mask(20)) ? 1 : 0;
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_GT(ones, 0);
  // 20 hash evaluations per call; the bound leaves a wide margin.
  EXPECT_LT(elapsed.count() / kCalls, 100e-6);
}

TEST(ModifiedClassTest, RevealsIndexBits) {
  const auto cls = modified_class(first_bit_class(4, PrgKind::test));
  const Concept c = cls.get(0b1010);
  EXPECT_FALSE(c.at(1));
  EXPECT_TRUE(c.at(2));
  EXPECT_FALSE(c.at(3));
  EXPECT_TRUE(c.at(4));
  EXPECT_EQ(cls.kind(), ClassKind::modified);
  EXPECT_EQ(cls.index_bits(), 4);
}

TEST(ModifiedClassTest, OtherInputsKeepBaseLabels) {
  const auto base = first_bit_class(10, PrgKind::hash);
  const auto cls = modified_class(base);
  std::mt19937_64 engine(8);
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t j = engine() & low_mask(10);
    const auto b = base.get(j).truth_table();
    const auto m = cls.get(j).truth_table();
    int disagree = 0;
    for (std::uint64_t x = 0; x < 1024; ++x) {
      if (x >= 1 && x <= 10) {
        EXPECT_EQ(m[x], (j >> (x - 1)) & 1U);
        disagree += b[x] != m[x] ? 1 : 0;
      } else {
        ASSERT_EQ(m[x], b[x]) << x;
      }
    }
    EXPECT_LE(disagree, 10);
  }
}

TEST(ModifiedClassTest, RequiresIndexBitsEqualN) {
  EXPECT_THROW(modified_class(random_function_class(8, Seed(0))), InvalidArgument);
  EXPECT_THROW(modified_class(exhaustive_class(2)), InvalidArgument);
}

TEST(ExhaustiveClassTest, TruthTablesAreIndices) {
  const auto cls = exhaustive_class(1);
  EXPECT_EQ(cls.index_bits(), 2);
  for (std::uint64_t j = 0; j < 4; ++j) {
    const auto t = cls.get(j).truth_table();
    EXPECT_EQ(t[0], j & 1U);
    EXPECT_EQ(t[1], (j >> 1) & 1U);
  }
  EXPECT_EQ(exhaustive_class(2).index_bits(), 4);
  EXPECT_THROW(exhaustive_class(5), Unsupported);
}

TEST(ExhaustiveClassTest, UniformIndexSampling) {
  const auto cls = exhaustive_class(2);
  auto engine = Seed(12).engine();
  std::vector<std::uint64_t> counts(16, 0);
  for (int i = 0; i < 10000; ++i) ++counts[cls.sample_index(engine)];
  for (int j = 0; j < 16; ++j) EXPECT_NEAR(counts[j] / 1e4, 1.0 / 16, oracle::three_sigma(1.0 / 16, 10000)) << j;
}

TEST(ConceptTest, WidthChecked) {
  const Concept c = Concept::parity(3);
  EXPECT_TRUE(c(Input(3, 1)));
  EXPECT_FALSE(c(Input(3, 3)));
  EXPECT_THROW(c(Input(4, 1)), InvalidArgument);
}

}  // namespace
}  // namespace pacshift
