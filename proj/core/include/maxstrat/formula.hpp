#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "maxstrat/numeric.hpp"

namespace maxstrat {

using VarId = std::uint32_t;

enum class Sort : std::uint8_t {
  StateBool,
  PrimedBool,
  ChoiceBool,
  SelectorBool,
  Num,
  PrimedNum,
  InputNum,
  Slack,
};

bool is_boolean(Sort sort);
const char* sort_name(Sort sort);

/// Symbol table: every variable has one name and one sort.
class Vocabulary {
 public:
  /// Declares `name`, or returns the existing id when the sort matches.
  /// Throws UsageError on a sort clash.
  VarId declare(const std::string& name, Sort sort);
  /// Declares a variable with an unused name derived from `prefix`.
  VarId fresh(const std::string& prefix, Sort sort);
  std::optional<VarId> find(const std::string& name) const;

  std::size_t size() const { return names_.size(); }
  const std::string& name(VarId var) const { return names_.at(var); }
  Sort sort(VarId var) const { return sorts_.at(var); }

 private:
  std::vector<std::string> names_;
  std::vector<Sort> sorts_;
  std::unordered_map<std::string, VarId> index_;
};

using LinearTerm = std::map<VarId, Rational>;

/// Linear expression with a constant part; used while building atoms.
struct LinExpr {
  LinearTerm terms;
  Rational constant;

  static LinExpr var(VarId v, Rational coeff = Rational(1));
  static LinExpr num(Rational value);
  LinExpr operator+(const LinExpr& other) const;
  LinExpr operator-(const LinExpr& other) const;
  LinExpr operator*(const Rational& scale) const;
};

enum class Cmp : std::uint8_t { Le, Lt, Eq };

/// `terms cmp rhs` in normal form: nonempty terms, leading coefficient of
/// magnitude one (and positive for equalities).
struct Atom {
  LinearTerm terms;
  Cmp cmp = Cmp::Le;
  Rational rhs;

  bool holds(const Rational& lhs_value) const;
  auto operator<=>(const Atom& other) const = default;
  bool operator==(const Atom& other) const = default;
};

class Formula {
 public:
  enum class Kind : std::uint8_t { True, False, Lit, Atom, And, Or };

  Formula();  // true

  static Formula top();
  static Formula bottom();
  static Formula constant(bool value) { return value ? top() : bottom(); }
  static Formula lit(VarId var, bool polarity = true);
  /// `lhs cmp rhs`; folds to a constant when no variable remains.
  static Formula compare(const LinExpr& lhs, Cmp cmp, const LinExpr& rhs);
  static Formula atom(Atom atom);
  static Formula conj(std::vector<Formula> children);
  static Formula disj(std::vector<Formula> children);

  Kind kind() const { return node_->kind; }
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }
  VarId var() const { return node_->var; }
  bool polarity() const { return node_->polarity; }
  const Atom& atom_value() const { return node_->atom; }
  const std::vector<Formula>& children() const { return node_->children; }
  const void* identity() const { return node_.get(); }

  /// Negation pushed to the leaves (NNF).
  Formula negate() const;

  /// Structural equality.
  bool operator==(const Formula& other) const;

 private:
  struct Node {
    Kind kind = Kind::True;
    VarId var = 0;
    bool polarity = true;
    struct Atom atom;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

inline Formula operator&&(const Formula& a, const Formula& b) {
  return Formula::conj({a, b});
}
inline Formula operator||(const Formula& a, const Formula& b) {
  return Formula::disj({a, b});
}

/// Total assignment for evaluation; entries indexed by VarId.
class Model {
 public:
  void set_bool(VarId var, bool value);
  void set_num(VarId var, Rational value);
  bool has_bool(VarId var) const { return var < bools_.size() && bools_[var].has_value(); }
  bool has_num(VarId var) const { return var < nums_.size() && nums_[var].has_value(); }
  /// Throws UsageError when unassigned.
  bool bool_value(VarId var) const;
  const Rational& num_value(VarId var) const;

  std::map<VarId, bool> bools() const;
  std::map<VarId, Rational> nums() const;

 private:
  std::vector<std::optional<bool>> bools_;
  std::vector<std::optional<Rational>> nums_;
};

Rational evaluate(const LinearTerm& terms, const Model& model);
/// Throws UsageError when a variable of `f` is unassigned.
bool evaluate(const Formula& f, const Model& model);

/// Replaces the listed Boolean variables by constants and simplifies.
Formula substitute_bools(const Formula& f, const std::map<VarId, bool>& values);
/// Replaces every atom by its truth value under `nums`; the result is purely
/// propositional. Throws UsageError on a missing numeric variable.
Formula eval_under_numeric(const Formula& f, const std::map<VarId, Rational>& nums);
/// Replaces variables by variables (same kind), e.g. unprimed to primed.
Formula rename(const Formula& f, const std::map<VarId, VarId>& mapping);

bool is_propositional(const Formula& f);
std::set<VarId> variables(const Formula& f);
std::set<VarId> bool_variables(const Formula& f);
std::size_t formula_size(const Formula& f);

/// S-expression rendering in the model-file syntax.
std::string to_string(const Formula& f, const Vocabulary& vocab);
std::string to_string(const LinearTerm& terms, const Vocabulary& vocab);

}  // namespace maxstrat
