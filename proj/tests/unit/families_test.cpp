#include <gtest/gtest.h>

#include <algorithm>

#include "maxstrat/engine.hpp"
#include "maxstrat/errors.hpp"
#include "maxstrat/families.hpp"
#include "maxstrat/oracle.hpp"

using namespace maxstrat;

TEST(Families, Shape) {
  for (std::size_t dims = 1; dims <= 3; ++dims) {
    for (std::size_t size = 1; size <= 4; ++size) {
      TransitionSystem ts = array_traversal(dims, size);
      EXPECT_EQ(ts.bools().size(), size);
      EXPECT_EQ(ts.nums().size(), dims);
      EXPECT_EQ(Template::box(ts).size(), 2 * dims);
    }
  }
  EXPECT_EQ(make_family("array2d", 3).name, "array2d_3");
}

TEST(Families, RejectsBadArguments) {
  EXPECT_THROW(make_family("array4d", 1), UsageError);
  EXPECT_THROW(make_family("array1d", 0), UsageError);
  EXPECT_THROW(array_traversal(0, 1), UsageError);
}

TEST(Families, OneDimensionalTraversalStaysInBounds) {
  TransitionSystem ts = array_traversal(1, 1);
  Template box = Template::box(ts);
  Engine engine(ts, box);
  engine.run();
  BoundTable table = tabulate(engine.space(), engine.value());
  // both directions cover exactly [0, 10]
  for (std::size_t s = 0; s < 2; ++s) {
    EXPECT_EQ(table[0][s], ExtRational(Rational(10)));
    EXPECT_EQ(table[1][s], ExtRational(Rational(0)));
  }
}

TEST(Families, MarkersDoNotChangeTheIndexBounds) {
  for (std::size_t dims = 1; dims <= 3; ++dims) {
    BoundTable small = [&] {
      TransitionSystem ts = array_traversal(dims, 1);
      Engine engine(ts, Template::box(ts));
      engine.run();
      return tabulate(engine.space(), engine.value());
    }();
    TransitionSystem ts = array_traversal(dims, 3);
    Engine engine(ts, Template::box(ts));
    engine.run();
    BoundTable big = tabulate(engine.space(), engine.value());
    // join over marker values equals the bound without markers
    for (std::size_t i = 0; i < big.size(); ++i) {
      for (std::size_t control = 0; control < 2; ++control) {
        ExtRational join = ExtRational::neg_inf();
        for (std::size_t s = control; s < big[i].size(); s += 2) join = std::max(join, big[i][s]);
        EXPECT_EQ(join, small[i][control]) << dims << " " << i << " " << control;
      }
    }
  }
}

class FamilyOracleTest : public ::testing::TestWithParam<std::tuple<std::size_t, std::size_t>> {};

TEST_P(FamilyOracleTest, VariantsMatchOracle) {
  auto [dims, size] = GetParam();
  TransitionSystem ts = array_traversal(dims, size);
  Template box = Template::box(ts);
  BoundTable expected = oracle::iterate_explicit(ts, box);
  EXPECT_TRUE(oracle::check_inductive(ts, box, expected).sound());
  for (char v : std::string("ntsgm")) {
    EngineConfig config;
    config.variant = parse_variant(std::string(1, v));
    Engine engine(ts, box, config);
    engine.run();
    EXPECT_EQ(oracle::diff(ts, box, expected, tabulate(engine.space(), engine.value())), "") << v;
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, FamilyOracleTest,
                         ::testing::Combine(::testing::Values(1U, 2U, 3U), ::testing::Values(1U, 2U, 3U)));
