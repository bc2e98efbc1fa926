#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace maxstrat {

/// Conflict-driven clause-learning SAT solver with two watched literals,
/// first-UIP learning, activity-based decisions and solving under
/// assumptions. Deterministic for a fixed call sequence.
class SatSolver {
 public:
  /// 2*var for the positive literal, 2*var+1 for the negative one.
  using Lit = std::int32_t;

  static Lit make_lit(int var, bool positive) { return 2 * var + (positive ? 0 : 1); }
  static int lit_var(Lit lit) { return lit >> 1; }
  static bool lit_positive(Lit lit) { return (lit & 1) == 0; }
  static Lit negate(Lit lit) { return lit ^ 1; }

  enum class Result { Sat, Unsat };

  int new_var();
  int num_vars() const { return static_cast<int>(assigns_.size()); }

  /// Adds a permanent clause. An empty clause makes the solver unsatisfiable.
  void add_clause(std::vector<Lit> clause);

  /// Throws ResourceError when the conflict budget of this call is exhausted.
  Result solve(const std::vector<Lit>& assumptions = {});

  /// Value of `var` in the last satisfying assignment.
  bool model_value(int var) const { return model_.at(static_cast<std::size_t>(var)); }

  void set_conflict_budget(std::uint64_t budget) { conflict_budget_ = budget; }
  std::uint64_t conflicts() const { return total_conflicts_; }
  std::uint64_t decisions() const { return total_decisions_; }

 private:
  enum : std::int8_t { kFalse = 0, kTrue = 1, kUndef = 2 };

  std::int8_t lit_value(Lit lit) const;
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  void enqueue(Lit lit, int reason);
  int propagate();
  void attach(int clause);
  void analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level);
  void backtrack(int level);
  void bump(int var);
  int pick_branch_var();

  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<bool> phase_;
  std::vector<double> activity_;
  std::set<std::pair<double, int>> order_;  // (-activity, var)
  std::vector<bool> in_order_;
  std::vector<bool> seen_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  double var_inc_ = 1.0;
  bool unsat_ = false;
  std::vector<bool> model_;
  std::uint64_t conflict_budget_ = 50'000'000;
  std::uint64_t total_conflicts_ = 0;
  std::uint64_t total_decisions_ = 0;
};

}  // namespace maxstrat
