#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maxstrat/space.hpp"
#include "maxstrat/system.hpp"

namespace maxstrat::oracle {

/// Largest number of Boolean state variables the explicit oracle accepts.
inline constexpr std::size_t kMaxBools = 6;

/// Strategy iteration with one strategy entry and one LP unknown per
/// concrete Boolean state. Throws UsageError when ts.n() > kMaxBools and
/// IterationCapError after `round_cap` rounds.
BoundTable iterate_explicit(const TransitionSystem& ts, const Template& tmpl,
                            std::size_t round_cap = 100'000);

/// A transition leaving the candidate invariant, or an initial state outside it.
struct Counterexample {
  bool initial = false;
  std::size_t row = 0;
  std::vector<bool> from;
  std::vector<bool> to;
  std::vector<bool> path;
  std::map<VarId, Rational> nums;

  std::string str(const TransitionSystem& ts) const;
};

struct InductiveReport {
  std::optional<Counterexample> counterexample;
  bool sound() const { return !counterexample; }
};

/// Checks init containment and closure under T. A state with any -inf bound
/// is empty: it is never a departure and any arrival there is a violation.
InductiveReport check_inductive(const TransitionSystem& ts, const Template& tmpl,
                                const BoundTable& table);

/// One cell of a row: the states sharing a finite bound.
struct ProbedCell {
  std::size_t row = 0;
  std::vector<std::size_t> states;
  Rational bound;
};

struct MinimalityReport {
  std::size_t probed = 0;
  std::vector<ProbedCell> still_inductive;
  bool least() const { return still_inductive.empty(); }
};

/// Lowers every finite cell by one in turn and records cells where the
/// result is still an inductive invariant.
MinimalityReport probe_minimality(const TransitionSystem& ts, const Template& tmpl,
                                  const BoundTable& table);

/// Cells of each row grouped by equal bound, in state-index order.
std::vector<ProbedCell> finite_cells(const BoundTable& table);

/// Line-per-difference comparison; empty when the tables agree.
std::string diff(const TransitionSystem& ts, const Template& tmpl, const BoundTable& expected,
                 const BoundTable& actual);

}  // namespace maxstrat::oracle
