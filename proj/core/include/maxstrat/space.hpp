#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "maxstrat/bdd.hpp"
#include "maxstrat/formula.hpp"
#include "maxstrat/mtbdd.hpp"
#include "maxstrat/numeric.hpp"
#include "maxstrat/system.hpp"

namespace maxstrat {

/// Strategy leaf for one (row, arrival state): either bottom (unreachable)
/// or a departure state together with a choice valuation.
struct Choice {
  bool bottom = true;
  std::vector<bool> state;
  std::vector<bool> path;

  static Choice none() { return {}; }
  static Choice of(std::vector<bool> state, std::vector<bool> path) {
    return {false, std::move(state), std::move(path)};
  }
  auto operator<=>(const Choice& other) const = default;
  bool operator==(const Choice& other) const = default;
  std::string str() const;
};

/// One cell of a row partition.
struct Cell {
  Bdd guard;
  ExtRational bound;
};

/// BDD variables for the Boolean state of a system: b_k is variable 2k and
/// b_k' is variable 2k+1.
class StateSpace {
 public:
  explicit StateSpace(const TransitionSystem& ts, std::size_t node_cap = std::size_t{1} << 24);
  StateSpace(const StateSpace&) = delete;
  StateSpace& operator=(const StateSpace&) = delete;

  const TransitionSystem& system() const { return *ts_; }
  BddManager& manager() { return manager_; }
  MtbddStore<ExtRational>& bounds() { return bounds_; }
  MtbddStore<Choice>& choices() { return choices_; }

  static BddVar current(std::size_t k) { return static_cast<BddVar>(2 * k); }
  static BddVar next(std::size_t k) { return static_cast<BddVar>(2 * k + 1); }

  /// Propositional formula over b and b' as a BDD; throws UsageError on
  /// other variables or linear atoms.
  Bdd to_bdd(const Formula& f);
  /// Formula with one shared node per BDD node (linear size).
  Formula to_formula(const Bdd& g) const;
  /// Moves b' variables onto b, and back.
  Bdd unprime(const Bdd& g) const;
  Bdd prime(const Bdd& g) const;

  /// Minterm of a concrete state over b (or b' when `primed`).
  Bdd state(const std::vector<bool>& values, bool primed = false);
  /// Manager-wide assignment that puts `values` on b (or b').
  std::vector<bool> assignment(const std::vector<bool>& values, bool primed = false) const;
  /// States satisfying init_bool (over b).
  Bdd init();
  /// Decodes a satisfying assignment of `g` (over b or b') into a state.
  std::vector<bool> pick(const Bdd& g, bool primed = false) const;

  /// Readable guard: a prime cover as `(or (and ...) ...)` over b.
  std::string guard_text(const Bdd& g) const;
  /// Canonical guard: disjoint path cubes, e.g. `!e&h|e`.
  std::string guard_cubes(const Bdd& g) const;

 private:
  const TransitionSystem* ts_;
  BddManager manager_;
  MtbddStore<ExtRational> bounds_;
  MtbddStore<Choice> choices_;
};

/// ρ: one bound diagram per template row, over b.
struct AbstractValue {
  std::vector<Mtbdd<ExtRational>> rows;

  /// Cells sorted by decreasing bound.
  std::vector<Cell> partition(std::size_t row) const;
  const ExtRational& at(std::size_t row, const std::vector<bool>& state) const;
  bool operator==(const AbstractValue& other) const = default;
};

/// σ and π: one packed diagram per template row, over b'.
struct Strategy {
  std::vector<Mtbdd<Choice>> rows;
};

/// Every row maps init states to A_i x⁰ and the rest to -inf.
AbstractValue initial_value(StateSpace& space, const Template& tmpl);

/// Throws EngineError unless the guards are pairwise disjoint and cover
/// every state.
void check_partition(const std::vector<Bdd>& guards, BddManager& manager);

/// Explicit table: table[row][state index], bit k of the index = b_k.
using BoundTable = std::vector<std::vector<ExtRational>>;
BoundTable tabulate(const StateSpace& space, const AbstractValue& value);
std::size_t state_index(const std::vector<bool>& state);
std::vector<bool> state_bits(std::size_t index, std::size_t n);

/// Human-readable listing, one block per row.
std::string format_text(const StateSpace& space, const Template& tmpl,
                        const AbstractValue& value);
/// Canonical line-oriented listing.
std::string format_machine(const StateSpace& space, const Template& tmpl,
                           const AbstractValue& value);

}  // namespace maxstrat
