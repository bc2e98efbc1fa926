#include <gtest/gtest.h>

#include "maxstrat/engine.hpp"
#include "maxstrat/errors.hpp"
#include "support/models.hpp"

using namespace maxstrat;

namespace {

struct Thermostat {
  ModelFile file = test_support::load_model("thermostat");
  Template tmpl = file.template_spec->build(file.system);
};

// Bound of `row` at the state (e, h, f).
ExtRational bound(const Engine& engine, std::size_t row, bool e, bool h, bool f) {
  return engine.value().at(row, {e, h, f});
}

ExtRational q(const char* text) { return ExtRational::parse(text); }

void expect_final(const Engine& engine) {
  for (bool f : {false, true}) {
    EXPECT_EQ(bound(engine, 0, false, true, f), q("365/16"));
    EXPECT_EQ(bound(engine, 0, false, false, f), q("365/16"));
    EXPECT_EQ(bound(engine, 1, false, true, f), q("-16"));
    EXPECT_EQ(bound(engine, 1, false, false, f), q("-71/4"));
    for (bool h : {false, true}) {
      EXPECT_TRUE(bound(engine, 0, true, h, f).is_neg_inf());
      EXPECT_TRUE(bound(engine, 1, true, h, f).is_neg_inf());
    }
  }
}

class VariantTest : public ::testing::TestWithParam<char> {};

}  // namespace

TEST(Engine, InitialValueIsTemplateAtStart) {
  Thermostat t;
  Engine engine(t.file.system, t.tmpl);
  for (bool f : {false, true}) {
    EXPECT_EQ(bound(engine, 0, false, true, f), q("16"));
    EXPECT_EQ(bound(engine, 1, false, true, f), q("-16"));
    EXPECT_TRUE(bound(engine, 0, true, true, f).is_neg_inf());
    EXPECT_TRUE(bound(engine, 1, false, false, f).is_neg_inf());
  }
}

TEST(Engine, FirstRoundRaisesUpperBoundOnly) {
  Thermostat t;
  Engine engine(t.file.system, t.tmpl);
  std::vector<StrategyUpdate> updates;
  engine.on_update = [&](const StrategyUpdate& u) { updates.push_back(u); };
  ASSERT_TRUE(engine.improve());
  for (const auto& u : updates) {
    EXPECT_EQ(u.row, 0U);
    EXPECT_EQ(u.choice.path, (std::vector<bool>{true, true, false}));
  }
  engine.evaluate();
  for (bool f : {false, true}) {
    EXPECT_EQ(bound(engine, 0, false, true, f), q("365/16"));
    EXPECT_EQ(bound(engine, 1, false, true, f), q("-16"));
    EXPECT_TRUE(bound(engine, 0, false, false, f).is_neg_inf());
  }
}

TEST(Engine, GeneralizationCoversBothFlagValues) {
  Thermostat t;
  Engine engine(t.file.system, t.tmpl);
  engine.improve();
  engine.evaluate();
  std::vector<StrategyUpdate> updates;
  engine.on_update = [&](const StrategyUpdate& u) { updates.push_back(u); };
  ASSERT_TRUE(engine.improve());
  StateSpace& s = engine.space();
  BddManager& m = s.manager();
  Bdd off = m.nvar(StateSpace::next(0)) & m.nvar(StateSpace::next(1));
  bool found = false;
  for (const auto& u : updates) {
    if (u.row != 0) continue;
    EXPECT_EQ(u.arrivals, off);
    EXPECT_EQ(u.choice.path, (std::vector<bool>{true, true, true}));
    EXPECT_FALSE(u.choice.state[0]);
    EXPECT_TRUE(u.choice.state[1]);
    found = true;
  }
  EXPECT_TRUE(found);
}

TEST(Engine, Psi1DropsBottomCells) {
  Thermostat t;
  Engine engine(t.file.system, t.tmpl);
  Formula psi = engine.psi1();
  auto vars = variables(psi);
  const auto& ts = engine.system();
  EXPECT_TRUE(vars.count(ts.bools()[0]));
  EXPECT_TRUE(vars.count(ts.nums()[0]));
  EXPECT_FALSE(vars.count(ts.primed_nums()[0]));
  Model at_start;
  at_start.set_bool(ts.bools()[0], false);
  at_start.set_bool(ts.bools()[1], true);
  at_start.set_bool(ts.bools()[2], false);
  at_start.set_num(ts.nums()[0], Rational(16));
  EXPECT_TRUE(evaluate(psi, at_start));
  at_start.set_num(ts.nums()[0], Rational(17));
  EXPECT_FALSE(evaluate(psi, at_start));
  at_start.set_num(ts.nums()[0], Rational(16));
  at_start.set_bool(ts.bools()[0], true);
  EXPECT_FALSE(evaluate(psi, at_start));
}

TEST(Engine, Psi2AdmitsAnyArrivalInBottomCell) {
  Thermostat t;
  Engine engine(t.file.system, t.tmpl);
  Formula psi = engine.psi2(0);
  const auto& ts = engine.system();
  Model m;
  for (std::size_t k = 0; k < 3; ++k) m.set_bool(ts.primed_bools()[k], false);
  m.set_num(ts.primed_nums()[0], Rational(-1000));
  m.set_num(engine.delta(), Rational(1));
  EXPECT_TRUE(evaluate(psi, m));
  m.set_bool(ts.primed_bools()[1], true);
  EXPECT_FALSE(evaluate(psi, m));
  m.set_num(ts.primed_nums()[0], Rational(17));
  EXPECT_TRUE(evaluate(psi, m));
}

TEST(Engine, UnreachableAtStartIsEverythingButInit) {
  Thermostat t;
  Engine engine(t.file.system, t.tmpl);
  Bdd z = engine.unreachable();
  EXPECT_EQ(z, !engine.space().init());
}

TEST_P(VariantTest, ThermostatReachesLeastInvariant) {
  Thermostat t;
  EngineConfig config;
  config.variant = parse_variant(std::string(1, GetParam()));
  Engine engine(t.file.system, t.tmpl, config);
  engine.run();
  expect_final(engine);
  EXPECT_TRUE(engine.least());
  EXPECT_FALSE(engine.improve());
}

TEST_P(VariantTest, ThermostatWithFreezingStaysSound) {
  Thermostat t;
  EngineConfig config;
  config.variant = parse_variant(std::string(1, GetParam()));
  config.freeze_class_budget = 1;
  Engine engine(t.file.system, t.tmpl, config);
  engine.run();
  for (bool f : {false, true}) {
    EXPECT_GE(bound(engine, 0, false, true, f), q("365/16"));
    EXPECT_GE(bound(engine, 1, false, false, f), q("-71/4"));
  }
}

INSTANTIATE_TEST_SUITE_P(AllVariants, VariantTest, ::testing::Values('n', 't', 's', 'g', 'm'));

TEST(Engine, IterationCapIsEnforced) {
  Thermostat t;
  EngineConfig config;
  config.iteration_cap = 1;
  Engine engine(t.file.system, t.tmpl, config);
  EXPECT_THROW(engine.run(), IterationCapError);
}

TEST(Engine, VariantLetters) {
  for (char c : std::string("ntsgm")) {
    EXPECT_EQ(variant_letter(parse_variant(std::string(1, c))), c);
  }
  EXPECT_THROW(parse_variant("x"), UsageError);
}

TEST(Engine, StatsAreCounted) {
  Thermostat t;
  Engine engine(t.file.system, t.tmpl);
  engine.run();
  const auto& s = engine.stats();
  EXPECT_GT(s.iterations, 0U);
  EXPECT_GT(s.smt_checks, s.iterations);
  EXPECT_GT(s.lp_solves, 0U);
  EXPECT_NE(s.str().find("smt_checks = "), std::string::npos);
}
