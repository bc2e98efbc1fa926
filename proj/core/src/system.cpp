#include "maxstrat/system.hpp"

#include <algorithm>

#include "maxstrat/errors.hpp"

namespace maxstrat {

namespace {

bool is_choice_lit(const Formula& f, const Vocabulary& vocab) {
  return f.kind() == Formula::Kind::Lit && vocab.sort(f.var()) == Sort::ChoiceBool;
}

// Choice literals at the top of a disjunct.
std::map<VarId, bool> label_cube(const Formula& f, const Vocabulary& vocab) {
  std::map<VarId, bool> cube;
  if (is_choice_lit(f, vocab)) {
    cube.emplace(f.var(), f.polarity());
  } else if (f.kind() == Formula::Kind::And) {
    for (const auto& c : f.children()) {
      if (is_choice_lit(c, vocab)) cube.emplace(c.var(), c.polarity());
    }
  }
  return cube;
}

bool contradicts(const std::map<VarId, bool>& a, const std::map<VarId, bool>& b) {
  for (const auto& [v, pol] : a) {
    auto it = b.find(v);
    if (it != b.end() && it->second != pol) return true;
  }
  return false;
}

bool already_labeled(const Formula& f, const Vocabulary& vocab) {
  std::vector<std::map<VarId, bool>> cubes;
  for (const auto& c : f.children()) {
    cubes.push_back(label_cube(c, vocab));
    if (cubes.back().empty()) return false;
  }
  for (std::size_t a = 0; a < cubes.size(); ++a) {
    for (std::size_t b = a + 1; b < cubes.size(); ++b) {
      if (!contradicts(cubes[a], cubes[b])) return false;
    }
  }
  return true;
}

void collect_path(const Formula& f, std::vector<Atom>& atoms, std::vector<Formula>& residue) {
  switch (f.kind()) {
    case Formula::Kind::True:
      return;
    case Formula::Kind::Atom:
      atoms.push_back(f.atom_value());
      return;
    case Formula::Kind::And:
      for (const auto& c : f.children()) collect_path(c, atoms, residue);
      return;
    default:
      if (!is_propositional(f)) {
        throw UsageError("transition has a disjunction of linear atoms not fixed by the choice");
      }
      residue.push_back(f);
  }
}

}  // namespace

VarId TransitionSystem::add_bool(const std::string& name) {
  if (vocab_.find(name)) throw UsageError("variable '" + name + "' declared twice");
  VarId v = vocab_.declare(name, Sort::StateBool);
  bools_.push_back(v);
  primed_bools_.push_back(vocab_.declare(name + "'", Sort::PrimedBool));
  return v;
}

VarId TransitionSystem::add_num(const std::string& name) {
  if (vocab_.find(name)) throw UsageError("variable '" + name + "' declared twice");
  VarId v = vocab_.declare(name, Sort::Num);
  nums_.push_back(v);
  primed_nums_.push_back(vocab_.declare(name + "'", Sort::PrimedNum));
  return v;
}

VarId TransitionSystem::add_input(const std::string& name) {
  if (vocab_.find(name)) throw UsageError("variable '" + name + "' declared twice");
  VarId v = vocab_.declare(name, Sort::InputNum);
  inputs_.push_back(v);
  return v;
}

VarId TransitionSystem::add_choice(const std::string& name) {
  if (vocab_.find(name)) throw UsageError("variable '" + name + "' declared twice");
  VarId v = vocab_.declare(name, Sort::ChoiceBool);
  choices_.push_back(v);
  return v;
}

Formula TransitionSystem::label(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::And: {
      std::vector<Formula> kids;
      for (const auto& c : f.children()) kids.push_back(label(c));
      return Formula::conj(std::move(kids));
    }
    case Formula::Kind::Or: {
      std::vector<Formula> kids;
      for (const auto& c : f.children()) kids.push_back(label(c));
      if (is_propositional(f) || already_labeled(f, vocab_)) return Formula::disj(std::move(kids));
      Formula rest = kids.back();
      std::vector<VarId> labels;
      for (std::size_t k = 0; k + 1 < kids.size(); ++k) {
        VarId p = vocab_.fresh("_p", Sort::ChoiceBool);
        choices_.push_back(p);
        labels.push_back(p);
      }
      for (std::size_t k = kids.size() - 1; k-- > 0;) {
        rest = Formula::disj({Formula::conj({Formula::lit(labels[k], true), kids[k]}),
                              Formula::conj({Formula::lit(labels[k], false), rest})});
      }
      return rest;
    }
    default:
      return f;
  }
}

void TransitionSystem::set_transition(const Formula& transition) {
  for (VarId v : variables(transition)) {
    switch (vocab_.sort(v)) {
      case Sort::StateBool:
      case Sort::PrimedBool:
      case Sort::ChoiceBool:
      case Sort::Num:
      case Sort::PrimedNum:
      case Sort::InputNum:
        break;
      default:
        throw UsageError("transition mentions auxiliary variable '" + vocab_.name(v) + "'");
    }
  }
  transition_ = label(transition);
  has_transition_ = true;
}

void TransitionSystem::set_init(const Formula& init_bool, std::vector<Rational> init_num) {
  for (VarId v : variables(init_bool)) {
    if (vocab_.sort(v) != Sort::StateBool) {
      throw UsageError("initial condition mentions non-state variable '" + vocab_.name(v) + "'");
    }
  }
  if (init_num.size() != nums_.size()) {
    throw UsageError("initial condition needs one value per numeric variable");
  }
  init_bool_ = init_bool;
  init_num_ = std::move(init_num);
}

std::size_t TransitionSystem::bool_index(VarId var) const {
  for (const auto* list : {&bools_, &primed_bools_}) {
    auto it = std::find(list->begin(), list->end(), var);
    if (it != list->end()) return static_cast<std::size_t>(it - list->begin());
  }
  throw UsageError("not a state Boolean: " + vocab_.name(var));
}

std::size_t TransitionSystem::num_index(VarId var) const {
  for (const auto* list : {&nums_, &primed_nums_}) {
    auto it = std::find(list->begin(), list->end(), var);
    if (it != list->end()) return static_cast<std::size_t>(it - list->begin());
  }
  throw UsageError("not a numeric state variable: " + vocab_.name(var));
}

bool TransitionSystem::is_initial(const std::vector<bool>& state) const {
  std::map<VarId, bool> values;
  for (std::size_t k = 0; k < bools_.size(); ++k) values.emplace(bools_[k], state.at(k));
  return substitute_bools(init_bool_, values).is_true();
}

bool same_system(const TransitionSystem& a, const TransitionSystem& b) {
  if (a.name != b.name || a.vocab().size() != b.vocab().size()) return false;
  for (VarId v = 0; v < a.vocab().size(); ++v) {
    if (a.vocab().name(v) != b.vocab().name(v) || a.vocab().sort(v) != b.vocab().sort(v)) {
      return false;
    }
  }
  return a.bools() == b.bools() && a.nums() == b.nums() && a.inputs() == b.inputs() &&
         a.choices() == b.choices() && a.transition() == b.transition() &&
         a.init_bool() == b.init_bool() && a.init_num() == b.init_num();
}

Template Template::box(const TransitionSystem& ts) {
  std::vector<TemplateRow> rows;
  for (VarId v : ts.nums()) {
    rows.push_back({{{v, Rational(1)}}, ""});
    rows.push_back({{{v, Rational(-1)}}, ""});
  }
  return custom(ts, std::move(rows));
}

Template Template::octagon(const TransitionSystem& ts) {
  Template out = box(ts);
  std::vector<TemplateRow> rows = out.rows_;
  const auto& xs = ts.nums();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      for (long si : {1L, -1L}) {
        for (long sj : {1L, -1L}) rows.push_back({{{xs[i], Rational(si)}, {xs[j], Rational(sj)}}, ""});
      }
    }
  }
  return custom(ts, std::move(rows));
}

Template Template::custom(const TransitionSystem& ts, std::vector<TemplateRow> rows) {
  if (rows.empty()) throw UsageError("template has no rows");
  for (auto& row : rows) {
    std::erase_if(row.form, [](const auto& t) { return t.second.is_zero(); });
    if (row.form.empty()) throw UsageError("template row is zero");
    for (const auto& [v, c] : row.form) {
      if (v >= ts.vocab().size() || ts.vocab().sort(v) != Sort::Num) {
        throw UsageError("template row uses a variable that is not numeric state");
      }
    }
    if (row.label.empty()) row.label = row_label(row.form, ts.vocab());
  }
  Template out;
  out.rows_ = std::move(rows);
  return out;
}

Rational Template::apply(std::size_t i, const TransitionSystem& ts,
                         const std::vector<Rational>& values) const {
  Rational sum;
  for (const auto& [v, c] : row(i).form) sum += c * values.at(ts.num_index(v));
  return sum;
}

LinearTerm Template::primed_row(std::size_t i, const TransitionSystem& ts) const {
  LinearTerm out;
  for (const auto& [v, c] : row(i).form) out.emplace(ts.primed_nums()[ts.num_index(v)], c);
  return out;
}

std::string row_label(const LinearTerm& form, const Vocabulary& vocab) {
  std::string out;
  for (const auto& [v, c] : form) {
    std::string piece;
    if (c == Rational(1)) {
      piece = vocab.name(v);
    } else if (c == Rational(-1)) {
      piece = "-" + vocab.name(v);
    } else {
      piece = c.str() + "*" + vocab.name(v);
    }
    if (!out.empty() && piece.front() != '-') out += "+";
    out += piece;
  }
  return out;
}

PathConjunction extract_path_conjunction(const TransitionSystem& ts,
                                         const std::vector<bool>& choice) {
  if (choice.size() != ts.d()) throw UsageError("choice valuation has the wrong size");
  std::map<VarId, bool> values;
  for (std::size_t k = 0; k < choice.size(); ++k) values.emplace(ts.choices()[k], choice[k]);
  Formula fixed = substitute_bools(ts.transition(), values);
  PathConjunction out;
  std::vector<Formula> residue;
  collect_path(fixed, out.atoms, residue);
  out.residue = Formula::conj(std::move(residue));
  return out;
}

}  // namespace maxstrat
