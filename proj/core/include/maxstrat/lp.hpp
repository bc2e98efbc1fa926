#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maxstrat/numeric.hpp"

namespace maxstrat {

/// Sparse linear form: variable index → nonzero coefficient.
using LinearForm = std::map<std::size_t, Rational>;

enum class Relation { Le, Eq };

struct LpConstraint {
  LinearForm form;
  Relation relation = Relation::Le;
  EpsRational rhs;
};

/// A maximization problem over free rational variables. Strict rows
/// `form < c` are stored as `form <= c - ε`.
class LpProblem {
 public:
  std::size_t add_variable(std::string name);
  std::size_t num_variables() const { return names_.size(); }
  const std::string& variable_name(std::size_t var) const { return names_.at(var); }

  /// Adds a row and returns its index.
  std::size_t add_constraint(LinearForm form, Relation relation, EpsRational rhs);
  std::size_t add_le(LinearForm form, Rational rhs);
  std::size_t add_lt(LinearForm form, Rational rhs);
  std::size_t add_ge(LinearForm form, Rational rhs);
  std::size_t add_gt(LinearForm form, Rational rhs);
  std::size_t add_eq(LinearForm form, Rational rhs);

  void set_objective(LinearForm objective) { objective_ = std::move(objective); }
  const LinearForm& objective() const { return objective_; }
  const std::vector<LpConstraint>& constraints() const { return constraints_; }

  /// Deterministic textual listing.
  std::string dump() const;

 private:
  void check_form(const LinearForm& form) const;

  std::vector<std::string> names_;
  std::vector<LpConstraint> constraints_;
  LinearForm objective_;
};

struct LpOutcome {
  enum class Status { Infeasible, Unbounded, Optimal };
  Status status = Status::Infeasible;
  EpsRational value;
  std::vector<EpsRational> witness;

  bool optimal() const { return status == Status::Optimal; }
};

/// Bounded-variable simplex with Bland's rule over one LpProblem. After a
/// successful feasibility check, several objectives can be maximized in turn,
/// each starting from the previous basis.
class LpSession {
 public:
  explicit LpSession(const LpProblem& problem);

  /// Runs the feasibility phase once; later calls return the cached verdict.
  bool feasible();
  /// Row indices whose conjunction is infeasible; valid after feasible()
  /// returned false.
  const std::vector<std::size_t>& conflict() const { return conflict_; }
  /// Current values of the problem variables (meaningful when feasible).
  std::vector<EpsRational> values() const;

  /// Requires feasible() == true.
  LpOutcome maximize(const LinearForm& objective);

 private:
  using Row = std::map<std::size_t, Rational>;

  bool below_lower(std::size_t var) const;
  bool above_upper(std::size_t var) const;
  bool can_increase(std::size_t var) const;
  bool can_decrease(std::size_t var) const;
  void pivot(std::size_t row, std::size_t entering);
  void update_nonbasic(std::size_t var, const EpsRational& value);
  void pivot_and_update(std::size_t row, std::size_t entering,
                        const EpsRational& value);
  void verify(const LinearForm* objective, const EpsRational* value) const;

  const LpProblem* problem_;
  std::size_t num_original_;
  std::vector<Row> rows_;
  std::vector<std::size_t> basic_of_row_;
  std::vector<std::size_t> row_of_var_;
  std::vector<EpsRational> value_;
  std::vector<std::optional<EpsRational>> lower_;
  std::vector<std::optional<EpsRational>> upper_;
  std::optional<bool> feasible_;
  std::vector<std::size_t> conflict_;
};

/// Exact maximization of the problem's objective.
LpOutcome lp_maximize(const LpProblem& problem);

struct StrictFeasibility {
  bool sat = false;
  /// Rational witness with ε instantiated (when sat).
  std::vector<Rational> witness;
  /// Infeasible subset of rows (when unsat).
  std::vector<std::size_t> conflict;
};

/// Decides the mixed strict/non-strict system exactly.
StrictFeasibility lp_feasible_strict(const LpProblem& problem);

/// Value of a linear form under an assignment.
EpsRational evaluate(const LinearForm& form, const std::vector<EpsRational>& values);
Rational evaluate(const LinearForm& form, const std::vector<Rational>& values);

}  // namespace maxstrat
