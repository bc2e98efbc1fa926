#include "maxstrat/formula.hpp"

#include <functional>
#include <unordered_set>

#include "maxstrat/errors.hpp"

namespace maxstrat {

bool is_boolean(Sort sort) {
  switch (sort) {
    case Sort::StateBool:
    case Sort::PrimedBool:
    case Sort::ChoiceBool:
    case Sort::SelectorBool:
      return true;
    default:
      return false;
  }
}

const char* sort_name(Sort sort) {
  switch (sort) {
    case Sort::StateBool:
      return "state-bool";
    case Sort::PrimedBool:
      return "primed-bool";
    case Sort::ChoiceBool:
      return "choice-bool";
    case Sort::SelectorBool:
      return "selector-bool";
    case Sort::Num:
      return "num";
    case Sort::PrimedNum:
      return "primed-num";
    case Sort::InputNum:
      return "input-num";
    case Sort::Slack:
      return "slack";
  }
  return "?";
}

VarId Vocabulary::declare(const std::string& name, Sort sort) {
  if (auto it = index_.find(name); it != index_.end()) {
    if (sorts_[it->second] != sort) {
      throw UsageError("variable '" + name + "' redeclared with sort " + sort_name(sort));
    }
    return it->second;
  }
  auto id = static_cast<VarId>(names_.size());
  names_.push_back(name);
  sorts_.push_back(sort);
  index_.emplace(name, id);
  return id;
}

VarId Vocabulary::fresh(const std::string& prefix, Sort sort) {
  for (std::size_t k = 0;; ++k) {
    std::string name = prefix + std::to_string(k);
    if (!index_.count(name)) return declare(name, sort);
  }
}

std::optional<VarId> Vocabulary::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LinExpr LinExpr::var(VarId v, Rational coeff) {
  LinExpr e;
  if (!coeff.is_zero()) e.terms.emplace(v, std::move(coeff));
  return e;
}

LinExpr LinExpr::num(Rational value) {
  LinExpr e;
  e.constant = std::move(value);
  return e;
}

LinExpr LinExpr::operator+(const LinExpr& other) const {
  LinExpr out = *this;
  for (const auto& [v, c] : other.terms) {
    auto [it, fresh] = out.terms.emplace(v, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) out.terms.erase(it);
    }
  }
  out.constant += other.constant;
  return out;
}

LinExpr LinExpr::operator-(const LinExpr& other) const { return *this + other * Rational(-1); }

LinExpr LinExpr::operator*(const Rational& scale) const {
  if (scale.is_zero()) return {};
  LinExpr out = *this;
  for (auto& [v, c] : out.terms) c *= scale;
  out.constant *= scale;
  return out;
}

bool Atom::holds(const Rational& lhs_value) const {
  switch (cmp) {
    case Cmp::Le:
      return lhs_value <= rhs;
    case Cmp::Lt:
      return lhs_value < rhs;
    case Cmp::Eq:
      return lhs_value == rhs;
  }
  return false;
}

namespace {

Formula make_atom_normalized(LinearTerm terms, Cmp cmp, Rational rhs) {
  if (terms.empty()) {
    Atom probe{{}, cmp, rhs};
    return Formula::constant(probe.holds(Rational(0)));
  }
  Rational lead = terms.begin()->second;
  Rational scale = Rational(1) / (cmp == Cmp::Eq ? lead : lead.abs());
  for (auto& [v, c] : terms) c *= scale;
  rhs *= scale;
  return Formula::atom(Atom{std::move(terms), cmp, std::move(rhs)});
}

LinearTerm negated(const LinearTerm& terms) {
  LinearTerm out = terms;
  for (auto& [v, c] : out) c = -c;
  return out;
}

}  // namespace

Formula::Formula() : Formula(top()) {}

Formula Formula::top() {
  static const auto node = std::make_shared<const Node>();
  return Formula(node);
}

Formula Formula::bottom() {
  static const auto node = [] {
    Node n;
    n.kind = Kind::False;
    return std::make_shared<const Node>(std::move(n));
  }();
  return Formula(node);
}

Formula Formula::lit(VarId var, bool polarity) {
  Node n;
  n.kind = Kind::Lit;
  n.var = var;
  n.polarity = polarity;
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::compare(const LinExpr& lhs, Cmp cmp, const LinExpr& rhs) {
  LinExpr diff = lhs - rhs;
  return make_atom_normalized(std::move(diff.terms), cmp, -diff.constant);
}

Formula Formula::atom(Atom atom) {
  if (atom.terms.empty()) return constant(atom.holds(Rational(0)));
  Rational lead = atom.terms.begin()->second;
  bool normal = lead == Rational(1) || (atom.cmp != Cmp::Eq && lead == Rational(-1));
  if (!normal) return make_atom_normalized(std::move(atom.terms), atom.cmp, std::move(atom.rhs));
  Node n;
  n.kind = Kind::Atom;
  n.atom = std::move(atom);
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::conj(std::vector<Formula> children) {
  std::vector<Formula> kept;
  std::unordered_set<const void*> seen;
  for (auto& c : children) {
    if (c.is_false()) return bottom();
    if (c.is_true() || !seen.insert(c.identity()).second) continue;
    kept.push_back(std::move(c));
  }
  if (kept.empty()) return top();
  if (kept.size() == 1) return kept.front();
  Node n;
  n.kind = Kind::And;
  n.children = std::move(kept);
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::disj(std::vector<Formula> children) {
  std::vector<Formula> kept;
  std::unordered_set<const void*> seen;
  for (auto& c : children) {
    if (c.is_true()) return top();
    if (c.is_false() || !seen.insert(c.identity()).second) continue;
    kept.push_back(std::move(c));
  }
  if (kept.empty()) return bottom();
  if (kept.size() == 1) return kept.front();
  Node n;
  n.kind = Kind::Or;
  n.children = std::move(kept);
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::negate() const {
  std::unordered_map<const void*, Formula> memo;
  std::function<Formula(const Formula&)> rec = [&](const Formula& f) -> Formula {
    if (auto it = memo.find(f.identity()); it != memo.end()) return it->second;
    Formula out;
    switch (f.kind()) {
      case Kind::True:
        out = bottom();
        break;
      case Kind::False:
        out = top();
        break;
      case Kind::Lit:
        out = lit(f.var(), !f.polarity());
        break;
      case Kind::Atom: {
        const Atom& a = f.atom_value();
        switch (a.cmp) {
          case Cmp::Le:
            out = make_atom_normalized(negated(a.terms), Cmp::Lt, -a.rhs);
            break;
          case Cmp::Lt:
            out = make_atom_normalized(negated(a.terms), Cmp::Le, -a.rhs);
            break;
          case Cmp::Eq:
            out = disj({make_atom_normalized(a.terms, Cmp::Lt, a.rhs),
                        make_atom_normalized(negated(a.terms), Cmp::Lt, -a.rhs)});
            break;
        }
        break;
      }
      case Kind::And:
      case Kind::Or: {
        std::vector<Formula> kids;
        for (const auto& c : f.children()) kids.push_back(rec(c));
        out = f.kind() == Kind::And ? disj(std::move(kids)) : conj(std::move(kids));
        break;
      }
    }
    memo.emplace(f.identity(), out);
    return out;
  };
  return rec(*this);
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::True:
    case Kind::False:
      return true;
    case Kind::Lit:
      return var() == other.var() && polarity() == other.polarity();
    case Kind::Atom:
      return atom_value() == other.atom_value();
    case Kind::And:
    case Kind::Or:
      if (children().size() != other.children().size()) return false;
      for (std::size_t k = 0; k < children().size(); ++k) {
        if (!(children()[k] == other.children()[k])) return false;
      }
      return true;
  }
  return false;
}

void Model::set_bool(VarId var, bool value) {
  if (bools_.size() <= var) bools_.resize(var + 1);
  bools_[var] = value;
}

void Model::set_num(VarId var, Rational value) {
  if (nums_.size() <= var) nums_.resize(var + 1);
  nums_[var] = std::move(value);
}

bool Model::bool_value(VarId var) const {
  if (!has_bool(var)) throw UsageError("model lacks a Boolean variable");
  return *bools_[var];
}

const Rational& Model::num_value(VarId var) const {
  if (!has_num(var)) throw UsageError("model lacks a numeric variable");
  return *nums_[var];
}

std::map<VarId, bool> Model::bools() const {
  std::map<VarId, bool> out;
  for (VarId v = 0; v < bools_.size(); ++v) {
    if (bools_[v]) out.emplace(v, *bools_[v]);
  }
  return out;
}

std::map<VarId, Rational> Model::nums() const {
  std::map<VarId, Rational> out;
  for (VarId v = 0; v < nums_.size(); ++v) {
    if (nums_[v]) out.emplace(v, *nums_[v]);
  }
  return out;
}

Rational evaluate(const LinearTerm& terms, const Model& model) {
  Rational sum;
  for (const auto& [v, c] : terms) sum += c * model.num_value(v);
  return sum;
}

bool evaluate(const Formula& f, const Model& model) {
  switch (f.kind()) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::False:
      return false;
    case Formula::Kind::Lit:
      return model.bool_value(f.var()) == f.polarity();
    case Formula::Kind::Atom:
      return f.atom_value().holds(evaluate(f.atom_value().terms, model));
    case Formula::Kind::And:
      for (const auto& c : f.children()) {
        if (!evaluate(c, model)) return false;
      }
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f.children()) {
        if (evaluate(c, model)) return true;
      }
      return false;
  }
  return false;
}

namespace {

/// Rebuilds `f` bottom-up, replacing leaves via `leaf`.
Formula transform(const Formula& f, const std::function<Formula(const Formula&)>& leaf) {
  std::unordered_map<const void*, Formula> memo;
  std::function<Formula(const Formula&)> rec = [&](const Formula& g) -> Formula {
    if (auto it = memo.find(g.identity()); it != memo.end()) return it->second;
    Formula out;
    if (g.kind() == Formula::Kind::And || g.kind() == Formula::Kind::Or) {
      std::vector<Formula> kids;
      bool changed = false;
      for (const auto& c : g.children()) {
        kids.push_back(rec(c));
        changed = changed || kids.back().identity() != c.identity();
      }
      if (!changed) {
        out = g;
      } else {
        out = g.kind() == Formula::Kind::And ? Formula::conj(std::move(kids))
                                             : Formula::disj(std::move(kids));
      }
    } else {
      out = leaf(g);
    }
    memo.emplace(g.identity(), out);
    return out;
  };
  return rec(f);
}

void visit(const Formula& f, const std::function<void(const Formula&)>& fn) {
  std::unordered_set<const void*> seen;
  std::function<void(const Formula&)> rec = [&](const Formula& g) {
    if (!seen.insert(g.identity()).second) return;
    fn(g);
    for (const auto& c : g.children()) rec(c);
  };
  rec(f);
}

}  // namespace

Formula substitute_bools(const Formula& f, const std::map<VarId, bool>& values) {
  return transform(f, [&](const Formula& g) {
    if (g.kind() != Formula::Kind::Lit) return g;
    auto it = values.find(g.var());
    if (it == values.end()) return g;
    return Formula::constant(it->second == g.polarity());
  });
}

Formula eval_under_numeric(const Formula& f, const std::map<VarId, Rational>& nums) {
  return transform(f, [&](const Formula& g) {
    if (g.kind() != Formula::Kind::Atom) return g;
    Rational lhs;
    for (const auto& [v, c] : g.atom_value().terms) {
      auto it = nums.find(v);
      if (it == nums.end()) throw UsageError("numeric assignment lacks a variable of the formula");
      lhs += c * it->second;
    }
    return Formula::constant(g.atom_value().holds(lhs));
  });
}

Formula rename(const Formula& f, const std::map<VarId, VarId>& mapping) {
  return transform(f, [&](const Formula& g) {
    if (g.kind() == Formula::Kind::Lit) {
      auto it = mapping.find(g.var());
      return it == mapping.end() ? g : Formula::lit(it->second, g.polarity());
    }
    if (g.kind() == Formula::Kind::Atom) {
      bool touched = false;
      Atom a = g.atom_value();
      LinearTerm renamed;
      for (const auto& [v, c] : a.terms) {
        auto it = mapping.find(v);
        VarId target = it == mapping.end() ? v : it->second;
        touched = touched || target != v;
        auto [pos, fresh] = renamed.emplace(target, c);
        if (!fresh) pos->second += c;
      }
      if (!touched) return g;
      std::erase_if(renamed, [](const auto& t) { return t.second.is_zero(); });
      return make_atom_normalized(std::move(renamed), a.cmp, a.rhs);
    }
    return g;
  });
}

bool is_propositional(const Formula& f) {
  bool result = true;
  visit(f, [&](const Formula& g) {
    if (g.kind() == Formula::Kind::Atom) result = false;
  });
  return result;
}

std::set<VarId> variables(const Formula& f) {
  std::set<VarId> out;
  visit(f, [&](const Formula& g) {
    if (g.kind() == Formula::Kind::Lit) out.insert(g.var());
    if (g.kind() == Formula::Kind::Atom) {
      for (const auto& [v, c] : g.atom_value().terms) out.insert(v);
    }
  });
  return out;
}

std::set<VarId> bool_variables(const Formula& f) {
  std::set<VarId> out;
  visit(f, [&](const Formula& g) {
    if (g.kind() == Formula::Kind::Lit) out.insert(g.var());
  });
  return out;
}

std::size_t formula_size(const Formula& f) {
  std::size_t count = 0;
  visit(f, [&](const Formula&) { ++count; });
  return count;
}

std::string to_string(const LinearTerm& terms, const Vocabulary& vocab) {
  auto term = [&](VarId v, const Rational& c) {
    if (c == Rational(1)) return vocab.name(v);
    return "(* " + c.str() + " " + vocab.name(v) + ")";
  };
  if (terms.empty()) return "0";
  if (terms.size() == 1) return term(terms.begin()->first, terms.begin()->second);
  std::string out = "(+";
  for (const auto& [v, c] : terms) out += " " + term(v, c);
  return out + ")";
}

std::string to_string(const Formula& f, const Vocabulary& vocab) {
  switch (f.kind()) {
    case Formula::Kind::True:
      return "true";
    case Formula::Kind::False:
      return "false";
    case Formula::Kind::Lit:
      return f.polarity() ? vocab.name(f.var()) : "(not " + vocab.name(f.var()) + ")";
    case Formula::Kind::Atom: {
      const Atom& a = f.atom_value();
      const char* op = a.cmp == Cmp::Le ? "<=" : a.cmp == Cmp::Lt ? "<" : "=";
      return std::string("(") + op + " " + to_string(a.terms, vocab) + " " + a.rhs.str() + ")";
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::string out = f.kind() == Formula::Kind::And ? "(and" : "(or";
      for (const auto& c : f.children()) out += " " + to_string(c, vocab);
      return out + ")";
    }
  }
  return "";
}

}  // namespace maxstrat
