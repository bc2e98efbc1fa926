#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxstrat/smt.hpp"
#include "maxstrat/space.hpp"
#include "maxstrat/system.hpp"

namespace maxstrat {

/// How improving strategies are selected.
///  Naive:      one SMT model per arrival state.
///  Transfer:   Naive, plus each model is offered to the other rows.
///  Symbolic:   one query over all rows, the row index encoded in selector
///              Booleans.
///  Generalize: each SMT model is widened to every arrival state it admits.
///  Full:       Generalize, then propositional models under the same
///              numeric witness are enumerated as well.
enum class Variant { Naive, Transfer, Symbolic, Generalize, Full };

/// Accepts n, t, s, g, m; throws UsageError otherwise.
Variant parse_variant(std::string_view text);
char variant_letter(Variant variant);

struct EngineConfig {
  Variant variant = Variant::Generalize;
  std::optional<std::size_t> freeze_class_budget;
  SmtBackend backend;
  std::uint64_t iteration_cap = 1'000'000;
};

struct EngineStats {
  std::uint64_t iterations = 0;
  std::uint64_t smt_checks = 0;
  std::uint64_t sat_enumerations = 0;
  std::uint64_t strategy_updates = 0;
  std::uint64_t lp_solves = 0;
  std::size_t lp_unknowns = 0;  // peak per strategy evaluation
  std::size_t lp_variables = 0;  // peak
  std::size_t lp_rows = 0;       // peak
  std::size_t classes = 0;       // last strategy evaluation
  std::uint64_t partition_checks = 0;
  std::size_t frozen_rows = 0;
  double wall_ms = 0;

  /// `key = value` lines.
  std::string str() const;
};

/// One bulk strategy assignment: every arrival state in `arrivals` (over b')
/// now follows `choice` for template row `row`.
struct StrategyUpdate {
  std::size_t row;
  Bdd arrivals;
  Choice choice;
};

/// Max-strategy iteration for one system and template. Holds its own copy of
/// the system; not copyable or movable because BDD handles point into it.
class Engine {
 public:
  Engine(const TransitionSystem& ts, const Template& tmpl, EngineConfig config = {});
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const TransitionSystem& system() const { return ts_; }
  const Template& tmpl() const { return tmpl_; }
  const EngineConfig& config() const { return config_; }
  StateSpace& space() { return *space_; }
  const StateSpace& space() const { return *space_; }
  const AbstractValue& value() const { return value_; }
  const Strategy& strategy() const { return strategy_; }
  const EngineStats& stats() const { return stats_; }
  VarId delta() const { return delta_; }
  bool stable() const { return stable_; }
  /// Whether a frozen partition may have cost leastness.
  bool least() const { return stats_.frozen_rows == 0; }

  /// Replaces ρ; the strategy is left untouched.
  void set_value(AbstractValue value) { value_ = std::move(value); }

  /// Departure constraint: for every row, the state lies in a cell and
  /// satisfies its bound.
  Formula psi1();
  /// Arrival constraint for `row`: A_row x' = c + Δ in a finite cell, or any
  /// arrival in a -inf cell.
  Formula psi2(std::size_t row);

  /// One strategy improvement; returns false when ρ is already inductive.
  bool improve();
  /// Arrival states (over b') that share the model's departure, path and
  /// numeric values, minus `excluded`.
  Bdd generalize(const Formula& psi, const Model& model, const Bdd& excluded);
  /// Abstractly unreachable states under the current strategy (over b).
  Bdd unreachable();
  /// Replaces ρ by the value of the current strategy.
  void evaluate();
  /// Iterates to a fixpoint. Throws IterationCapError past the cap.
  void run();

  std::function<void(const StrategyUpdate&)> on_update;
  std::function<void(std::uint64_t round, const AbstractValue& value)> on_round;

 private:
  struct Class {
    Bdd guard;  // over b
    Choice choice;
    bool unknown = false;
    ExtRational value;
    std::size_t lp_var = 0;
  };

  struct Decoded {
    std::vector<bool> from;
    std::vector<bool> to;
    std::vector<bool> path;
    std::map<VarId, Rational> nums;
  };

  Decoded decode(const Model& model) const;
  Bdd apply_update(std::size_t row, const Bdd& arrivals, const Choice& choice);
  void improve_row(std::size_t row, const Formula& psi1);
  void improve_symbolic(const Formula& psi1);
  void transfer(const Decoded& hit, std::size_t from_row);
  void freeze_rows();
  void refine_frozen();
  std::vector<std::vector<Class>> classes(const Bdd& unreachable);
  const PathConjunction& path(const std::vector<bool>& choice);
  ExtRational max_bound(std::size_t row, const Bdd& set) const;

  TransitionSystem ts_;
  Template tmpl_;
  EngineConfig config_;
  VarId delta_;
  std::vector<VarId> selectors_;
  std::unique_ptr<StateSpace> space_;
  std::unique_ptr<SmtSolver> smt_;
  AbstractValue value_;
  Strategy strategy_;
  std::vector<Bdd> updated_;  // U per row, over b'
  // cells over b', refined so that each carries a single bound
  std::vector<std::optional<std::vector<Bdd>>> frozen_;
  std::map<std::vector<bool>, PathConjunction> paths_;
  bool stable_ = false;
  EngineStats stats_;
};

}  // namespace maxstrat
