#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "maxstrat/bdd.hpp"
#include "maxstrat/engine.hpp"
#include "maxstrat/families.hpp"
#include "maxstrat/lp.hpp"
#include "maxstrat/parser.hpp"

using namespace maxstrat;

namespace {

// Bounded random LP: box |x_k| <= 10 plus `rows` random cuts.
LpProblem random_lp(std::size_t vars, std::size_t rows, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coeff(-5, 5);
  LpProblem lp;
  for (std::size_t k = 0; k < vars; ++k) {
    std::size_t v = lp.add_variable("x" + std::to_string(k));
    lp.add_le({{v, Rational(1)}}, Rational(10));
    lp.add_ge({{v, Rational(1)}}, Rational(-10));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    LinearForm form;
    for (std::size_t k = 0; k < vars; ++k) form[k] = Rational(coeff(rng));
    lp.add_le(form, Rational(std::uniform_int_distribution<int>(0, 20)(rng)));
  }
  LinearForm objective;
  for (std::size_t k = 0; k < vars; ++k) objective[k] = Rational(coeff(rng));
  lp.set_objective(objective);
  return lp;
}

void BM_SimplexMaximize(benchmark::State& state) {
  auto vars = static_cast<std::size_t>(state.range(0));
  LpProblem lp = random_lp(vars, 2 * vars, 7);
  for (auto _ : state) {
    LpSession session(lp);
    benchmark::DoNotOptimize(session.maximize(lp.objective()));
  }
}
BENCHMARK(BM_SimplexMaximize)->Arg(4)->Arg(8)->Arg(16);

// Equality of two n-bit vectors under the interleaved order.
void BM_BddBitvectorEquality(benchmark::State& state) {
  auto bits = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> names;
  for (std::size_t k = 0; k < bits; ++k) {
    names.push_back("a" + std::to_string(k));
    names.push_back("b" + std::to_string(k));
  }
  for (auto _ : state) {
    BddManager manager(names);
    Bdd eq = manager.one();
    for (std::size_t k = 0; k < bits; ++k) {
      eq &= !(manager.var(static_cast<BddVar>(2 * k)) ^ manager.var(static_cast<BddVar>(2 * k + 1)));
    }
    benchmark::DoNotOptimize(eq.sat_count());
  }
}
BENCHMARK(BM_BddBitvectorEquality)->Arg(8)->Arg(32)->Arg(128);

void BM_EngineThermostat(benchmark::State& state) {
  std::ifstream in(std::string(MAXSTRAT_MODELS_DIR) + "/thermostat.ts");
  std::ostringstream text;
  text << in.rdbuf();
  ModelFile model = parse_model(text.str());
  Template tmpl = model.template_spec->build(model.system);
  EngineConfig config;
  config.variant = static_cast<Variant>(state.range(0));
  for (auto _ : state) {
    Engine engine(model.system, tmpl, config);
    engine.run();
    benchmark::DoNotOptimize(engine.stats().iterations);
  }
}
BENCHMARK(BM_EngineThermostat)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_EngineArray1d(benchmark::State& state) {
  TransitionSystem ts = array_traversal(1, static_cast<std::size_t>(state.range(1)));
  Template tmpl = Template::box(ts);
  EngineConfig config;
  config.variant = static_cast<Variant>(state.range(0));
  for (auto _ : state) {
    Engine engine(ts, tmpl, config);
    engine.run();
    state.counters["smt_checks"] = static_cast<double>(engine.stats().smt_checks);
  }
}
BENCHMARK(BM_EngineArray1d)->ArgsProduct({{0, 3}, {1, 2, 3, 4}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
