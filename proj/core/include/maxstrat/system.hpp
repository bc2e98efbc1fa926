#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "maxstrat/formula.hpp"
#include "maxstrat/numeric.hpp"

namespace maxstrat {

/// Transition system over Boolean state b, numeric state x, numeric inputs y
/// and path-choice Booleans p. Primed copies b', x' name the arrival state.
class TransitionSystem {
 public:
  std::string name = "system";

  /// Declares a state variable together with its primed copy `name'`.
  VarId add_bool(const std::string& name);
  VarId add_num(const std::string& name);
  VarId add_input(const std::string& name);
  VarId add_choice(const std::string& name);

  /// Installs the transition formula. Or nodes that contain linear atoms and
  /// are not already told apart by choice literals get fresh choice
  /// variables (`_pK`), the left disjunct taking the positive literal.
  /// Throws UsageError on variables outside b, b', x, x', y, p.
  void set_transition(const Formula& transition);
  /// Throws UsageError when `init_bool` mentions anything but b, or when
  /// `init_num` does not have one value per numeric state variable.
  void set_init(const Formula& init_bool, std::vector<Rational> init_num);

  const Vocabulary& vocab() const { return vocab_; }
  /// Mutable access for callers that add auxiliary variables (Δ, selectors).
  Vocabulary& vocab() { return vocab_; }

  const std::vector<VarId>& bools() const { return bools_; }
  const std::vector<VarId>& primed_bools() const { return primed_bools_; }
  const std::vector<VarId>& nums() const { return nums_; }
  const std::vector<VarId>& primed_nums() const { return primed_nums_; }
  const std::vector<VarId>& inputs() const { return inputs_; }
  const std::vector<VarId>& choices() const { return choices_; }

  std::size_t n() const { return bools_.size(); }
  std::size_t m() const { return nums_.size(); }
  std::size_t d() const { return choices_.size(); }
  std::size_t e() const { return inputs_.size(); }

  const Formula& transition() const { return transition_; }
  const Formula& init_bool() const { return init_bool_; }
  const std::vector<Rational>& init_num() const { return init_num_; }
  bool has_transition() const { return has_transition_; }

  /// Position of a state Boolean in bools(), or of a primed one in
  /// primed_bools(); throws UsageError otherwise.
  std::size_t bool_index(VarId var) const;
  std::size_t num_index(VarId var) const;

  /// Whether a Boolean state (bit k = value of bools()[k]) satisfies init.
  bool is_initial(const std::vector<bool>& state) const;

 private:
  Formula label(const Formula& f);

  Vocabulary vocab_;
  std::vector<VarId> bools_;
  std::vector<VarId> primed_bools_;
  std::vector<VarId> nums_;
  std::vector<VarId> primed_nums_;
  std::vector<VarId> inputs_;
  std::vector<VarId> choices_;
  Formula transition_;
  bool has_transition_ = false;
  Formula init_bool_;
  std::vector<Rational> init_num_;
};

/// Structural equality of declarations, formulas and initial values.
bool same_system(const TransitionSystem& a, const TransitionSystem& b);

struct TemplateRow {
  LinearTerm form;  // over the unprimed numeric variables
  std::string label;
};

/// The template matrix A: one linear form per row.
class Template {
 public:
  /// Rows x_k and -x_k for every numeric variable.
  static Template box(const TransitionSystem& ts);
  /// Box rows plus ±x_i ± x_j for i < j.
  static Template octagon(const TransitionSystem& ts);
  /// Throws UsageError on an empty row list, a zero row or a variable that
  /// is not a numeric state variable of `ts`.
  static Template custom(const TransitionSystem& ts, std::vector<TemplateRow> rows);

  std::size_t size() const { return rows_.size(); }
  const TemplateRow& row(std::size_t i) const { return rows_.at(i); }
  const std::vector<TemplateRow>& rows() const { return rows_; }

  /// A_i x for numeric values indexed like ts.nums().
  Rational apply(std::size_t i, const TransitionSystem& ts,
                 const std::vector<Rational>& values) const;
  /// A_i with variables moved to their primed copies.
  LinearTerm primed_row(std::size_t i, const TransitionSystem& ts) const;

 private:
  std::vector<TemplateRow> rows_;
};

/// Compact row label such as `x`, `-x`, `x+y` or `2x-3y`.
std::string row_label(const LinearTerm& form, const Vocabulary& vocab);

/// The linear atoms of T selected by a fixed choice valuation, together with
/// the propositional remainder over (b, b').
struct PathConjunction {
  std::vector<Atom> atoms;
  Formula residue;
};

/// `choice` holds one value per ts.choices(). Throws UsageError on a
/// wrong-sized valuation or when T is not labeled.
PathConjunction extract_path_conjunction(const TransitionSystem& ts,
                                         const std::vector<bool>& choice);

}  // namespace maxstrat
