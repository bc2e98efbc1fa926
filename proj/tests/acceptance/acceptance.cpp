// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "maxstrat/engine.hpp"
#include "maxstrat/errors.hpp"
#include "maxstrat/families.hpp"
#include "maxstrat/lp.hpp"
#include "maxstrat/oracle.hpp"
#include "maxstrat/smt.hpp"
#include "support/corpus.hpp"
#include "support/models.hpp"
#include "support/random_formula.hpp"
#include "support/vertex_oracle.hpp"

using namespace maxstrat;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::string kVariants = "ntsgm";
const std::vector<std::string> kModels{"thermostat", "identity", "counter", "two_mode"};

struct Case {
  std::string name;
  TransitionSystem system;
  Template tmpl;
};

std::vector<Case> all_cases() {
  std::vector<Case> cases;
  for (unsigned seed = 1; seed <= test_support::kCorpusSize; ++seed) {
    auto c = test_support::random_system(seed);
    cases.push_back({"seed " + std::to_string(seed), std::move(c.system), std::move(c.tmpl)});
  }
  for (const auto& name : kModels) {
    ModelFile file = test_support::load_model(name);
    Template tmpl = file.template_spec ? file.template_spec->build(file.system) : Template::box(file.system);
    cases.push_back({name, std::move(file.system), std::move(tmpl)});
  }
  return cases;
}

EngineConfig config_for(char variant, std::optional<std::size_t> freeze = std::nullopt) {
  EngineConfig config;
  config.variant = parse_variant(std::string(1, variant));
  config.freeze_class_budget = freeze;
  return config;
}

BoundTable run_table(const Case& c, char variant, std::optional<std::size_t> freeze = std::nullopt) {
  Engine engine(c.system, c.tmpl, config_for(variant, freeze));
  engine.run();
  return tabulate(engine.space(), engine.value());
}

bool below(const BoundTable& a, const BoundTable& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t s = 0; s < a[i].size(); ++s) {
      if (a[i][s] > b[i][s]) return false;
    }
  }
  return true;
}

// Collects failure messages; the first few are reported.
class Failures {
 public:
  void add(std::string message) {
    ++count_;
    if (messages_.size() < 3) messages_.push_back(std::move(message));
  }
  bool empty() const { return count_ == 0; }
  std::string str() const {
    std::string out = std::to_string(count_) + " failure(s)";
    for (const auto& m : messages_) out += "; " + m;
    return out;
  }

 private:
  std::size_t count_ = 0;
  std::vector<std::string> messages_;
};

struct Verdict {
  bool pass;
  std::string detail;
};

Verdict from(const Failures& f, std::string summary) {
  return f.empty() ? Verdict{true, std::move(summary)} : Verdict{false, f.str()};
}

ModelFile thermostat() { return test_support::load_model("thermostat"); }

ExtRational q(const char* text) { return ExtRational::parse(text); }

Verdict thermostat_exactness() {
  ModelFile file = thermostat();
  TemplateSpec box;
  Template tmpl = box.build(file.system);
  Failures failures;
  double slowest = 0;
  for (char v : kVariants) {
    auto start = Clock::now();
    Engine engine(file.system, tmpl, config_for(v));
    engine.run();
    double elapsed = seconds_since(start);
    slowest = std::max(slowest, elapsed);
    if (elapsed >= 2.0) failures.add(std::string(1, v) + " took " + std::to_string(elapsed) + " s");
    for (bool e : {false, true}) {
      for (bool h : {false, true}) {
        for (bool f : {false, true}) {
          ExtRational upper = e ? ExtRational::neg_inf() : q("365/16");
          ExtRational lower = e ? ExtRational::neg_inf() : (h ? q("-16") : q("-71/4"));
          if (engine.value().at(0, {e, h, f}) != upper || engine.value().at(1, {e, h, f}) != lower) {
            failures.add(std::string("variant ") + v + " differs at e=" + std::to_string(e) +
                         " h=" + std::to_string(h) + " f=" + std::to_string(f));
          }
        }
      }
    }
  }
  std::ostringstream summary;
  summary << "5 variants exact, slowest " << slowest << " s";
  return from(failures, summary.str());
}

Verdict intermediate_step() {
  ModelFile file = thermostat();
  Template tmpl = file.template_spec->build(file.system);
  Engine engine(file.system, tmpl, config_for('g'));
  Failures failures;
  if (engine.value().at(0, {false, true, true}) != q("16")) failures.add("start bound is not 16");
  if (!engine.improve()) failures.add("first improvement found nothing");
  engine.evaluate();
  if (engine.value().at(0, {false, true, true}) != q("365/16")) {
    failures.add("first round gives " + engine.value().at(0, {false, true, true}).str());
  }
  std::vector<StrategyUpdate> updates;
  engine.on_update = [&](const StrategyUpdate& u) {
    if (u.row == 0) updates.push_back(u);
  };
  engine.improve();
  BddManager& m = engine.space().manager();
  Bdd heater_off = m.nvar(StateSpace::next(0)) & m.nvar(StateSpace::next(1));
  if (updates.size() != 1) {
    failures.add(std::to_string(updates.size()) + " row-1 updates instead of one bulk update");
  } else if (updates[0].arrivals != heater_off) {
    failures.add("bulk update covers " + engine.space().guard_text(updates[0].arrivals));
  }
  return from(failures, "365/16 after one round; one bulk update over both fan values");
}

Verdict variant_oracle_agreement() {
  auto start = Clock::now();
  auto cases = all_cases();
  Failures failures;
  for (const auto& c : cases) {
    BoundTable expected = oracle::iterate_explicit(c.system, c.tmpl);
    for (char v : kVariants) {
      std::string diff = oracle::diff(c.system, c.tmpl, expected, run_table(c, v));
      if (!diff.empty()) failures.add(c.name + " variant " + std::string(1, v) + ": " + diff);
    }
  }
  double elapsed = seconds_since(start);
  if (elapsed >= 300) failures.add("took " + std::to_string(elapsed) + " s");
  std::ostringstream summary;
  summary << cases.size() << " systems x 5 variants exact in " << elapsed << " s";
  return from(failures, summary.str());
}

Verdict soundness() {
  Failures failures;
  std::size_t probed = 0;
  for (const auto& c : all_cases()) {
    for (char v : kVariants) {
      BoundTable table = run_table(c, v);
      auto inductive = oracle::check_inductive(c.system, c.tmpl, table);
      if (!inductive.sound()) {
        failures.add(c.name + " variant " + std::string(1, v) + ": " + inductive.counterexample->str(c.system));
        continue;
      }
      auto minimality = oracle::probe_minimality(c.system, c.tmpl, table);
      probed += minimality.probed;
      if (!minimality.least()) failures.add(c.name + " variant " + std::string(1, v) + ": a decremented cell stays inductive");
    }
  }
  return from(failures, std::to_string(probed) + " finite cells probed");
}

// Disjoint and covering, by enumerating every assignment of the diagram's variables.
bool explicit_partition(const std::vector<Bdd>& guards, std::size_t vars) {
  for (std::size_t code = 0; code < (std::size_t{1} << vars); ++code) {
    std::vector<bool> assignment(vars);
    for (std::size_t k = 0; k < vars; ++k) assignment[k] = (code >> k) & 1U;
    std::size_t hits = 0;
    for (const auto& g : guards) hits += g.eval(assignment) ? 1 : 0;
    if (hits != 1) return false;
  }
  return true;
}

Verdict partition_invariants() {
  Failures failures;
  std::uint64_t in_engine = 0;
  std::size_t checked = 0;
  for (const auto& c : all_cases()) {
    for (char v : kVariants) {
      for (auto freeze : {std::optional<std::size_t>{}, std::optional<std::size_t>{2}}) {
        Engine engine(c.system, c.tmpl, config_for(v, freeze));
        std::size_t vars = engine.space().manager().num_vars();
        auto check_round = [&] {
          for (std::size_t i = 0; i < c.tmpl.size(); ++i) {
            std::vector<Bdd> value_guards;
            for (const auto& cell : engine.value().partition(i)) value_guards.push_back(cell.guard);
            std::vector<Bdd> strategy_guards;
            for (const auto& [choice, guard] : engine.strategy().rows[i].reverse_image()) strategy_guards.push_back(guard);
            checked += 2;
            if (!explicit_partition(value_guards, vars) || !explicit_partition(strategy_guards, vars)) {
              failures.add(c.name + " variant " + std::string(1, v) + " row " + std::to_string(i));
            }
          }
        };
        engine.on_round = [&](std::uint64_t, const AbstractValue&) { check_round(); };
        try {
          engine.run();
        } catch (const EngineError& e) {
          failures.add(c.name + ": " + e.what());
        }
        check_round();
        in_engine += engine.stats().partition_checks;
      }
    }
  }
  if (in_engine == 0) failures.add("the engine performed no partition checks");
  return from(failures, std::to_string(in_engine) + " in-engine checks, " + std::to_string(checked) +
                            " partitions enumerated");
}

Verdict monotone_ascent() {
  Failures failures;
  std::uint64_t rounds = 0;
  for (const auto& c : all_cases()) {
    for (char v : kVariants) {
      Engine engine(c.system, c.tmpl, config_for(v));
      BoundTable previous = tabulate(engine.space(), engine.value());
      std::uint64_t seen = 0;
      engine.on_round = [&](std::uint64_t, const AbstractValue& value) {
        BoundTable next = tabulate(engine.space(), value);
        if (!below(previous, next) || next == previous) {
          failures.add(c.name + " variant " + std::string(1, v) + " round " + std::to_string(seen));
        }
        previous = std::move(next);
        ++seen;
      };
      try {
        engine.run();
      } catch (const IterationCapError& e) {
        failures.add(c.name + ": " + e.what());
      }
      if (seen != engine.stats().iterations) failures.add(c.name + ": round count mismatch");
      rounds += seen;
    }
  }
  return from(failures, std::to_string(rounds) + " rounds strictly increasing");
}

Verdict solver_cross_checks() {
  Failures failures;
  std::mt19937 rng(4242);
  std::size_t sat = 0;
  const std::size_t formulas = 500;
  for (std::size_t trial = 0; trial < formulas; ++trial) {
    Vocabulary vocab;
    std::vector<VarId> bools, nums;
    auto nb = std::uniform_int_distribution<std::size_t>(0, 6)(rng);
    auto nn = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    for (std::size_t k = 0; k < nb; ++k) bools.push_back(vocab.declare("b" + std::to_string(k), Sort::StateBool));
    for (std::size_t k = 0; k < nn; ++k) nums.push_back(vocab.declare("x" + std::to_string(k), Sort::Num));
    Formula f = oracle_support::random_formula(rng, bools, nums, 3);
    bool expected = oracle_support::brute_force_sat(f, bools);
    InternalSmt smt(vocab);
    smt.assert_formula(f);
    bool got = smt.check() == SmtResult::Sat;
    if (got != expected) failures.add("formula " + to_string(f, vocab));
    if (got && !evaluate(f, smt.model())) failures.add("bad model for " + to_string(f, vocab));
    sat += got ? 1 : 0;
  }
  const std::size_t lps = 200;
  const Rational box(1000000);
  for (std::size_t trial = 0; trial < lps; ++trial) {
    auto lp = oracle_support::random_lp(rng, false, nullptr);
    std::size_t n = lp.objective.size();
    auto small = oracle_support::vertex_maximum(oracle_support::with_box(lp.rows, n, box), lp.objective);
    auto large = oracle_support::vertex_maximum(oracle_support::with_box(lp.rows, n, box * 2), lp.objective);
    LpOutcome out = lp_maximize(lp.problem);
    bool agree = !small    ? out.status == LpOutcome::Status::Infeasible
                 : *small != *large ? out.status == LpOutcome::Status::Unbounded
                                    : out.optimal() && out.value == EpsRational(*small);
    if (!agree) failures.add("lp " + lp.problem.dump());
  }
  return from(failures, std::to_string(formulas) + " formulas (" + std::to_string(sat) + " sat), " +
                            std::to_string(lps) + " LPs");
}

// Each increment is positive and at least 1.5 times the previous one.
bool grows_geometrically(const std::vector<std::uint64_t>& counts) {
  for (std::size_t k = 2; k < counts.size(); ++k) {
    double before = static_cast<double>(counts[k - 1]) - static_cast<double>(counts[k - 2]);
    double after = static_cast<double>(counts[k]) - static_cast<double>(counts[k - 1]);
    if (before <= 0 || after < 1.5 * before) return false;
  }
  return true;
}

Verdict scaling_trend() {
  Failures failures;
  std::ostringstream summary;
  for (const auto& family : family_names()) {
    std::map<char, std::vector<std::uint64_t>> counts;
    for (std::size_t size = 1; size <= 4; ++size) {
      TransitionSystem ts = make_family(family, size);
      Template box = Template::box(ts);
      for (char v : {'n', 'g'}) {
        Engine engine(ts, box, config_for(v));
        engine.run();
        counts[v].push_back(engine.stats().smt_checks);
      }
      if (size >= 2 && counts['g'].back() >= counts['n'].back()) {
        failures.add(family + " size " + std::to_string(size) + ": g not below n");
      }
    }
    if (!grows_geometrically(counts['n'])) failures.add(family + ": n does not grow geometrically");
    if (grows_geometrically(counts['g'])) failures.add(family + ": g grows geometrically");
    summary << family;
    for (char v : {'n', 'g'}) {
      summary << " " << v << "=";
      for (std::size_t k = 0; k < counts[v].size(); ++k) summary << (k ? "," : "") << counts[v][k];
    }
    summary << "; ";
  }
  std::string text = summary.str();
  return from(failures, text.substr(0, text.size() - 2));
}

Verdict freezing_soundness() {
  Failures failures;
  std::size_t frozen_runs = 0;
  for (const auto& c : all_cases()) {
    BoundTable least = run_table(c, 'g');
    for (char v : kVariants) {
      Engine engine(c.system, c.tmpl, config_for(v, 2));
      engine.run();
      BoundTable frozen = tabulate(engine.space(), engine.value());
      frozen_runs += engine.least() ? 0 : 1;
      if (!below(least, frozen)) failures.add(c.name + " variant " + std::string(1, v) + " below least");
      auto report = oracle::check_inductive(c.system, c.tmpl, frozen);
      if (!report.sound()) failures.add(c.name + " variant " + std::string(1, v) + ": " + report.counterexample->str(c.system));
    }
  }
  return from(failures, std::to_string(frozen_runs) + " runs froze a row");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"thermostat-exactness", thermostat_exactness},
      {"intermediate-step", intermediate_step},
      {"variant-oracle-agreement", variant_oracle_agreement},
      {"soundness", soundness},
      {"partition-invariants", partition_invariants},
      {"monotone-ascent", monotone_ascent},
      {"solver-cross-checks", solver_cross_checks},
      {"scaling-trend", scaling_trend},
      {"freezing-soundness", freezing_soundness},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict verdict;
    try {
      verdict = check();
    } catch (const std::exception& e) {
      verdict = {false, std::string("exception: ") + e.what()};
    }
    failed += verdict.pass ? 0 : 1;
    std::cout << (verdict.pass ? "PASS " : "FAIL ") << name << " (" << verdict.detail << ")" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
