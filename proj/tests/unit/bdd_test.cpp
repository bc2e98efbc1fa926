#include <gtest/gtest.h>

#include <map>
#include <random>

#include "maxstrat/bdd.hpp"
#include "maxstrat/errors.hpp"
#include "maxstrat/mtbdd.hpp"
#include "maxstrat/numeric.hpp"

using namespace maxstrat;

namespace {

std::vector<bool> bits(unsigned code, std::size_t n) {
  std::vector<bool> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = (code >> k) & 1U;
  return out;
}

// Thermostat layout: e, e', h, h', f, f'.
std::vector<std::string> thermostat_vars() {
  return {"e", "e'", "h", "h'", "f", "f'"};
}

struct RandomFormula {
  Bdd bdd;
  std::vector<bool> table;
};

RandomFormula random_formula(BddManager& m, std::mt19937& rng, std::size_t n,
                             int depth) {
  std::size_t rows = std::size_t{1} << n;
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
  int op = pick(rng);
  if (op <= 1) {
    std::uniform_int_distribution<BddVar> var(0, static_cast<BddVar>(n - 1));
    BddVar v = var(rng);
    bool pol = op == 0;
    RandomFormula out{m.literal(v, pol), std::vector<bool>(rows)};
    for (std::size_t r = 0; r < rows; ++r) out.table[r] = (((r >> v) & 1U) != 0) == pol;
    return out;
  }
  RandomFormula a = random_formula(m, rng, n, depth - 1);
  if (op == 5) {
    RandomFormula out{!a.bdd, a.table};
    out.table.flip();
    return out;
  }
  RandomFormula b = random_formula(m, rng, n, depth - 1);
  RandomFormula out{Bdd(), std::vector<bool>(rows)};
  for (std::size_t r = 0; r < rows; ++r) {
    bool x = a.table[r], y = b.table[r];
    out.table[r] = op == 2 ? (x && y) : op == 3 ? (x || y) : (x != y);
  }
  out.bdd = op == 2 ? (a.bdd & b.bdd) : op == 3 ? (a.bdd | b.bdd) : (a.bdd ^ b.bdd);
  return out;
}

}  // namespace

TEST(Bdd, Contradiction) {
  BddManager m({"x"});
  EXPECT_TRUE((m.var(0) & !m.var(0)).is_false());
  EXPECT_TRUE((m.var(0) | !m.var(0)).is_true());
}

TEST(Bdd, RestrictDropsVariable) {
  BddManager m(thermostat_vars());
  Bdd f = m.nvar(0) & m.var(2);
  EXPECT_EQ(f.restrict(0, false), m.var(2));
  EXPECT_TRUE(f.restrict(0, true).is_false());
}

TEST(Bdd, OneSatSatisfies) {
  BddManager m(thermostat_vars());
  Bdd g = m.nvar(1) & m.nvar(3);
  auto sat = g.one_sat();
  ASSERT_TRUE(sat.has_value());
  EXPECT_TRUE(g.eval(*sat));
  EXPECT_FALSE(m.zero().one_sat().has_value());
  // two satisfying assignments over the primed variables e', h', f'
  int count = 0;
  for (bool fp : {false, true}) {
    std::vector<bool> a(6, false);
    a[5] = fp;
    if (g.eval(a)) ++count;
  }
  EXPECT_EQ(count, 2);
}

TEST(Bdd, ManagerMismatch) {
  BddManager a({"x"});
  BddManager b({"x"});
  EXPECT_THROW(a.var(0) & b.var(0), ManagerMismatchError);
  EXPECT_THROW(a.ite(a.var(0), b.one(), a.zero()), ManagerMismatchError);
}

TEST(Bdd, NodeCap) {
  BddManager m({"a", "b", "c", "d"}, 5);
  EXPECT_THROW({
    Bdd f = m.zero();
    for (BddVar v = 0; v < 4; ++v) f = f ^ m.var(v);
  }, ResourceError);
}

TEST(Bdd, CanonicityRandomized) {
  std::mt19937 rng(2024);
  for (std::size_t n : {2, 4, 7, 10}) {
    BddManager m([&] {
      std::vector<std::string> names;
      for (std::size_t k = 0; k < n; ++k) names.push_back("v" + std::to_string(k));
      return names;
    }());
    std::vector<RandomFormula> pool;
    for (int k = 0; k < 40; ++k) pool.push_back(random_formula(m, rng, n, 4));
    for (std::size_t a = 0; a < pool.size(); ++a) {
      for (std::size_t r = 0; r < pool[a].table.size(); ++r) {
        ASSERT_EQ(pool[a].bdd.eval(bits(static_cast<unsigned>(r), n)), pool[a].table[r]);
      }
      for (std::size_t b = 0; b < pool.size(); ++b) {
        EXPECT_EQ(pool[a].table == pool[b].table, pool[a].bdd == pool[b].bdd);
      }
    }
  }
}

TEST(Bdd, PrimeCoverIsEquivalent) {
  std::mt19937 rng(5);
  BddManager m({"a", "b", "c", "d", "e"});
  for (int trial = 0; trial < 100; ++trial) {
    RandomFormula f = random_formula(m, rng, 5, 4);
    Bdd rebuilt = m.zero();
    for (const Cube& cube : f.bdd.prime_cover()) {
      Bdd c = m.cube(cube);
      EXPECT_TRUE(c.implies(f.bdd));
      // primality: dropping any literal leaves the function
      for (std::size_t k = 0; k < cube.size(); ++k) {
        Cube wider = cube;
        wider.erase(wider.begin() + static_cast<std::ptrdiff_t>(k));
        EXPECT_FALSE(m.cube(wider).implies(f.bdd));
      }
      rebuilt |= c;
    }
    EXPECT_EQ(rebuilt, f.bdd);
  }
}

TEST(Bdd, RenameAndExists) {
  BddManager m(thermostat_vars());
  Bdd primed = m.nvar(1) & m.var(3);
  std::vector<BddVar> unprime = {0, 0, 2, 2, 4, 4};
  EXPECT_EQ(primed.rename(unprime), m.nvar(0) & m.var(2));
  EXPECT_EQ((m.var(0) & m.var(2)).exists(0), m.var(2));
}

TEST(Bdd, DumpIsDeterministic) {
  BddManager m1(thermostat_vars());
  BddManager m2(thermostat_vars());
  Bdd a = (m1.var(4) & m1.var(2)) | m1.nvar(0);
  Bdd b = m2.nvar(0) | (m2.var(2) & m2.var(4));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(m1.one().dump(), "root 1\n");
}

TEST(Mtbdd, ConstantPartition) {
  BddManager m({"a"});
  MtbddStore<ExtRational> store(m);
  auto parts = store.constant(ExtRational(7)).reverse_image();
  ASSERT_EQ(parts.size(), 1U);
  EXPECT_TRUE(parts[0].second.is_true());
  EXPECT_EQ(parts[0].first, ExtRational(7));
}

TEST(Mtbdd, ThermostatRowAfterFirstImprovement) {
  BddManager m(thermostat_vars());
  MtbddStore<ExtRational> store(m);
  Bdd cell = m.nvar(0) & m.var(2);
  auto rho = store.constant(ExtRational::neg_inf()).assign(cell, Rational(365, 16));
  auto parts = rho.reverse_image();
  ASSERT_EQ(parts.size(), 2U);
  EXPECT_EQ(parts[0].first, ExtRational::neg_inf());
  EXPECT_EQ(parts[0].second, m.var(0) | m.nvar(2));
  EXPECT_EQ(parts[1].first, ExtRational(Rational(365, 16)));
  EXPECT_EQ(parts[1].second, cell);
}

TEST(Mtbdd, SharedValueGroupsAssignments) {
  BddManager m({"b1", "b2"});
  MtbddStore<int> store(m);
  auto f = store.ite(m.var(0), store.constant(3),
                     store.ite(m.var(1), store.constant(3), store.constant(5)));
  std::map<int, Bdd> oracle;
  for (unsigned code = 0; code < 4; ++code) {
    auto a = bits(code, 2);
    int v = a[0] ? 3 : (a[1] ? 3 : 5);
    Bdd mt = m.minterm({0, 1}, a);
    auto [it, fresh] = oracle.emplace(v, mt);
    if (!fresh) it->second |= mt;
  }
  auto parts = f.reverse_image();
  ASSERT_EQ(parts.size(), 2U);
  EXPECT_EQ(parts[0].first, 3);
  EXPECT_EQ(parts[0].second, m.var(0) | m.var(1));
  EXPECT_EQ(parts[0].second, oracle.at(3));
  EXPECT_EQ(parts[1].first, 5);
  EXPECT_EQ(parts[1].second, m.nvar(0) & m.nvar(1));
}

TEST(Mtbdd, AssignBulkUpdate) {
  BddManager m(thermostat_vars());
  using Choice = std::vector<int>;  // empty encodes bottom
  MtbddStore<Choice> store(m);
  auto bottom = store.constant({});
  Bdd g = m.nvar(1) & m.nvar(3);
  auto f = bottom.assign(g, {1, 1, 1});
  for (unsigned code = 0; code < 64; ++code) {
    auto a = bits(code, 6);
    bool in = !a[1] && !a[3];
    EXPECT_EQ(f.eval(a), (in ? Choice{1, 1, 1} : Choice{}));
  }
  EXPECT_EQ(f.assign(m.zero(), {9}), f);
  EXPECT_EQ(f.assign(m.one(), {9}), store.constant({9}));
}

TEST(Mtbdd, InjectiveOnTwoPoints) {
  BddManager m({"a"});
  MtbddStore<int> store(m);
  auto f = store.ite(m.var(0), store.constant(1), store.constant(2));
  auto parts = f.reverse_image();
  ASSERT_EQ(parts.size(), 2U);
  EXPECT_EQ(parts[0].second, m.var(0));
  EXPECT_EQ(parts[1].second, m.nvar(0));
}

TEST(Mtbdd, ReverseImageMatchesBruteForce) {
  std::mt19937 rng(99);
  BddManager m({"a", "b", "c"});
  MtbddStore<int> store(m);
  std::uniform_int_distribution<int> val(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> table(8);
    auto f = store.constant(0);
    for (unsigned code = 0; code < 8; ++code) {
      table[code] = val(rng);
      f = f.assign(m.minterm({0, 1, 2}, bits(code, 3)), table[code]);
    }
    std::map<int, Bdd> oracle;
    for (unsigned code = 0; code < 8; ++code) {
      Bdd mt = m.minterm({0, 1, 2}, bits(code, 3));
      auto [it, fresh] = oracle.emplace(table[code], mt);
      if (!fresh) it->second |= mt;
    }
    auto parts = f.reverse_image();
    ASSERT_EQ(parts.size(), oracle.size());
    Bdd cover = m.zero();
    for (std::size_t k = 0; k < parts.size(); ++k) {
      EXPECT_EQ(parts[k].second, oracle.at(parts[k].first));
      EXPECT_TRUE((cover & parts[k].second).is_false());
      cover |= parts[k].second;
    }
    EXPECT_TRUE(cover.is_true());
  }
}

TEST(Mtbdd, ForallPairsAndMap) {
  BddManager m({"a", "b"});
  MtbddStore<int> ints(m);
  auto f = ints.ite(m.var(0), ints.constant(1), ints.constant(4));
  auto g = ints.ite(m.var(1), ints.constant(2), ints.constant(5));
  EXPECT_FALSE(forall_pairs(f, g, [](int x, int y) { return x <= y; }));
  EXPECT_TRUE(forall_pairs(f, ints.constant(4), [](int x, int y) { return x <= y; }));
  MtbddStore<bool> bools(m);
  auto big = map_leaves(f, bools, [](int x) { return x > 2; });
  EXPECT_EQ(big.preimage([](bool b) { return b; }), m.nvar(0));
}

TEST(Mtbdd, DumpListsLeaves) {
  BddManager m({"a"});
  MtbddStore<int> store(m);
  auto f = store.ite(m.var(0), store.constant(1), store.constant(2));
  EXPECT_EQ(f.dump([](int v) { return std::to_string(v); }),
            "@0: [2]\n@1: [1]\n@2: a ? @1 : @0\nroot @2\n");
}
