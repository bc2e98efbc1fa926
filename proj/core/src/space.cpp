#include "maxstrat/space.hpp"

#include <functional>
#include <sstream>
#include <unordered_map>

#include "maxstrat/errors.hpp"

namespace maxstrat {

namespace {

std::vector<std::string> bdd_names(const TransitionSystem& ts) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < ts.n(); ++k) {
    names.push_back(ts.vocab().name(ts.bools()[k]));
    names.push_back(ts.vocab().name(ts.primed_bools()[k]));
  }
  return names;
}

std::string bits(const std::vector<bool>& values) {
  std::string out;
  for (bool b : values) out += b ? '1' : '0';
  return out;
}

}  // namespace

std::string Choice::str() const {
  if (bottom) return "bottom";
  return "from " + bits(state) + " via " + bits(path);
}

StateSpace::StateSpace(const TransitionSystem& ts, std::size_t node_cap)
    : ts_(&ts), manager_(bdd_names(ts), node_cap), bounds_(manager_), choices_(manager_) {}

Bdd StateSpace::to_bdd(const Formula& f) {
  std::unordered_map<const void*, Bdd> memo;
  std::function<Bdd(const Formula&)> rec = [&](const Formula& g) -> Bdd {
    if (auto it = memo.find(g.identity()); it != memo.end()) return it->second;
    Bdd out;
    switch (g.kind()) {
      case Formula::Kind::True:
        out = manager_.one();
        break;
      case Formula::Kind::False:
        out = manager_.zero();
        break;
      case Formula::Kind::Lit: {
        Sort sort = ts_->vocab().sort(g.var());
        if (sort != Sort::StateBool && sort != Sort::PrimedBool) {
          throw UsageError("state formula mentions '" + ts_->vocab().name(g.var()) + "'");
        }
        std::size_t k = ts_->bool_index(g.var());
        out = manager_.literal(sort == Sort::StateBool ? current(k) : next(k), g.polarity());
        break;
      }
      case Formula::Kind::Atom:
        throw UsageError("state formula contains a linear atom");
      case Formula::Kind::And:
        out = manager_.one();
        for (const auto& c : g.children()) out &= rec(c);
        break;
      case Formula::Kind::Or:
        out = manager_.zero();
        for (const auto& c : g.children()) out |= rec(c);
        break;
    }
    memo.emplace(g.identity(), out);
    return out;
  };
  return rec(f);
}

Formula StateSpace::to_formula(const Bdd& g) const {
  manager_.check_owner(g);
  std::unordered_map<NodeId, Formula> memo;
  std::function<Formula(const Bdd&)> rec = [&](const Bdd& h) -> Formula {
    if (h.is_true()) return Formula::top();
    if (h.is_false()) return Formula::bottom();
    if (auto it = memo.find(h.id()); it != memo.end()) return it->second;
    BddVar v = h.top_var();
    std::size_t k = v / 2;
    VarId var = v % 2 == 0 ? ts_->bools()[k] : ts_->primed_bools()[k];
    Formula pos = Formula::lit(var, true);
    Formula neg = Formula::lit(var, false);
    Bdd hi = h.high();
    Bdd lo = h.low();
    Formula out;
    if (hi.is_true() && lo.is_false()) {
      out = pos;
    } else if (hi.is_false() && lo.is_true()) {
      out = neg;
    } else if (hi.is_true()) {
      out = Formula::disj({pos, rec(lo)});
    } else if (lo.is_true()) {
      out = Formula::disj({neg, rec(hi)});
    } else if (hi.is_false()) {
      out = Formula::conj({neg, rec(lo)});
    } else if (lo.is_false()) {
      out = Formula::conj({pos, rec(hi)});
    } else {
      out = Formula::disj({Formula::conj({pos, rec(hi)}), Formula::conj({neg, rec(lo)})});
    }
    memo.emplace(h.id(), out);
    return out;
  };
  return rec(g);
}

Bdd StateSpace::unprime(const Bdd& g) const {
  std::vector<BddVar> mapping(manager_.num_vars());
  for (BddVar v = 0; v < mapping.size(); ++v) mapping[v] = v % 2 == 1 ? v - 1 : v;
  return g.rename(mapping);
}

Bdd StateSpace::prime(const Bdd& g) const {
  std::vector<BddVar> mapping(manager_.num_vars());
  for (BddVar v = 0; v < mapping.size(); ++v) mapping[v] = v % 2 == 0 ? v + 1 : v;
  return g.rename(mapping);
}

Bdd StateSpace::state(const std::vector<bool>& values, bool primed) {
  std::vector<BddVar> vars;
  for (std::size_t k = 0; k < ts_->n(); ++k) vars.push_back(primed ? next(k) : current(k));
  return manager_.minterm(vars, values);
}

std::vector<bool> StateSpace::assignment(const std::vector<bool>& values, bool primed) const {
  std::vector<bool> out(manager_.num_vars(), false);
  for (std::size_t k = 0; k < values.size(); ++k) out[primed ? next(k) : current(k)] = values[k];
  return out;
}

Bdd StateSpace::init() { return to_bdd(ts_->init_bool()); }

std::vector<bool> StateSpace::pick(const Bdd& g, bool primed) const {
  auto sat = g.one_sat();
  if (!sat) throw UsageError("cannot pick a state from an empty set");
  std::vector<bool> out(ts_->n());
  for (std::size_t k = 0; k < ts_->n(); ++k) out[k] = (*sat)[primed ? next(k) : current(k)];
  return out;
}

std::string StateSpace::guard_text(const Bdd& g) const {
  if (g.is_true()) return "true";
  if (g.is_false()) return "false";
  auto lit = [&](const std::pair<BddVar, bool>& l) {
    const std::string& name = manager_.var_name(l.first);
    return l.second ? name : "(not " + name + ")";
  };
  std::vector<std::string> cubes;
  for (const Cube& cube : g.prime_cover()) {
    if (cube.size() == 1) {
      cubes.push_back(lit(cube[0]));
      continue;
    }
    std::string c = "(and";
    for (const auto& l : cube) c += " " + lit(l);
    cubes.push_back(c + ")");
  }
  if (cubes.size() == 1) return cubes[0];
  std::string out = "(or";
  for (const auto& c : cubes) out += " " + c;
  return out + ")";
}

std::string StateSpace::guard_cubes(const Bdd& g) const {
  if (g.is_true()) return "*";
  if (g.is_false()) return "-";
  std::string out;
  for (const Cube& cube : g.paths()) {
    if (!out.empty()) out += "|";
    std::string c;
    for (const auto& [v, pol] : cube) {
      if (!c.empty()) c += "&";
      c += (pol ? "" : "!") + manager_.var_name(v);
    }
    out += c;
  }
  return out;
}

std::vector<Cell> AbstractValue::partition(std::size_t row) const {
  std::vector<Cell> out;
  auto image = rows.at(row).reverse_image();
  for (auto it = image.rbegin(); it != image.rend(); ++it) out.push_back({it->second, it->first});
  return out;
}

const ExtRational& AbstractValue::at(std::size_t row, const std::vector<bool>& state) const {
  const auto& f = rows.at(row);
  std::vector<bool> full(f.store()->manager().num_vars(), false);
  for (std::size_t k = 0; k < state.size(); ++k) full[StateSpace::current(k)] = state[k];
  return f.eval(full);
}

AbstractValue initial_value(StateSpace& space, const Template& tmpl) {
  const TransitionSystem& ts = space.system();
  Bdd init = space.init();
  AbstractValue out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    auto bottom = space.bounds().constant(ExtRational::neg_inf());
    out.rows.push_back(bottom.assign(init, tmpl.apply(i, ts, ts.init_num())));
  }
  return out;
}

void check_partition(const std::vector<Bdd>& guards, BddManager& manager) {
  Bdd seen = manager.zero();
  for (const auto& g : guards) {
    if (!(seen & g).is_false()) throw EngineError("partition cells overlap");
    seen |= g;
  }
  if (!seen.is_true()) throw EngineError("partition cells do not cover every state");
}

std::size_t state_index(const std::vector<bool>& state) {
  std::size_t index = 0;
  for (std::size_t k = 0; k < state.size(); ++k) {
    if (state[k]) index |= std::size_t{1} << k;
  }
  return index;
}

std::vector<bool> state_bits(std::size_t index, std::size_t n) {
  std::vector<bool> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = (index >> k) & 1U;
  return out;
}

BoundTable tabulate(const StateSpace& space, const AbstractValue& value) {
  std::size_t n = space.system().n();
  BoundTable table(value.rows.size());
  for (std::size_t i = 0; i < value.rows.size(); ++i) {
    for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) {
      table[i].push_back(value.at(i, state_bits(s, n)));
    }
  }
  return table;
}

std::string format_text(const StateSpace& space, const Template& tmpl,
                        const AbstractValue& value) {
  std::ostringstream out;
  out << "system " << space.system().name << "\n";
  for (std::size_t i = 0; i < value.rows.size(); ++i) {
    out << "row " << i + 1 << ": " << tmpl.row(i).label << "\n";
    for (const auto& cell : value.partition(i)) {
      out << "  " << space.guard_text(cell.guard) << " -> " << cell.bound.str() << "\n";
    }
  }
  return out.str();
}

std::string format_machine(const StateSpace& space, const Template& tmpl,
                           const AbstractValue& value) {
  std::ostringstream out;
  out << "system " << space.system().name << "\n";
  for (std::size_t i = 0; i < value.rows.size(); ++i) {
    out << "row " << i << " " << tmpl.row(i).label << "\n";
    for (const auto& cell : value.partition(i)) {
      out << "cell " << cell.bound.str() << " " << space.guard_cubes(cell.guard) << "\n";
    }
  }
  return out.str();
}

}  // namespace maxstrat
