#include "maxstrat/engine.hpp"

#include <chrono>
#include <sstream>

#include "maxstrat/errors.hpp"
#include "maxstrat/lp.hpp"

namespace maxstrat {

namespace {

std::size_t selector_width(std::size_t rows) {
  std::size_t width = 0;
  while ((std::size_t{1} << width) < rows) ++width;
  return width;
}

bool bool_of(const Model& model, VarId var) { return model.has_bool(var) && model.bool_value(var); }

}  // namespace

Variant parse_variant(std::string_view text) {
  if (text == "n") return Variant::Naive;
  if (text == "t") return Variant::Transfer;
  if (text == "s") return Variant::Symbolic;
  if (text == "g") return Variant::Generalize;
  if (text == "m") return Variant::Full;
  throw UsageError("unknown variant '" + std::string(text) + "' (expected n, t, s, g or m)");
}

char variant_letter(Variant variant) {
  switch (variant) {
    case Variant::Naive:
      return 'n';
    case Variant::Transfer:
      return 't';
    case Variant::Symbolic:
      return 's';
    case Variant::Generalize:
      return 'g';
    case Variant::Full:
      return 'm';
  }
  return '?';
}

std::string EngineStats::str() const {
  std::ostringstream out;
  out << "iterations = " << iterations << "\n"
      << "smt_checks = " << smt_checks << "\n"
      << "sat_enumerations = " << sat_enumerations << "\n"
      << "strategy_updates = " << strategy_updates << "\n"
      << "lp_solves = " << lp_solves << "\n"
      << "lp_unknowns = " << lp_unknowns << "\n"
      << "lp_variables = " << lp_variables << "\n"
      << "lp_rows = " << lp_rows << "\n"
      << "classes = " << classes << "\n"
      << "partition_checks = " << partition_checks << "\n"
      << "frozen_rows = " << frozen_rows << "\n";
  return out.str();
}

Engine::Engine(const TransitionSystem& ts, const Template& tmpl, EngineConfig config)
    : ts_(ts), tmpl_(tmpl), config_(std::move(config)) {
  delta_ = ts_.vocab().fresh("_delta", Sort::Slack);
  if (config_.variant == Variant::Symbolic) {
    for (std::size_t k = 0; k < selector_width(tmpl_.size()); ++k) {
      selectors_.push_back(ts_.vocab().fresh("_row", Sort::SelectorBool));
    }
  }
  space_ = std::make_unique<StateSpace>(ts_);
  smt_ = make_smt(config_.backend, ts_.vocab());
  Formula positive = Formula::compare(LinExpr::num(Rational(0)), Cmp::Lt, LinExpr::var(delta_));
  smt_->assert_formula(Formula::conj({ts_.transition(), positive}));
  value_ = initial_value(*space_, tmpl_);
  auto none = space_->choices().constant(Choice::none());
  strategy_.rows.assign(tmpl_.size(), none);
  frozen_.resize(tmpl_.size());
}

Formula Engine::psi1() {
  std::vector<Formula> rows;
  for (std::size_t i = 0; i < tmpl_.size(); ++i) {
    auto cells = value_.partition(i);
    std::vector<Bdd> guards;
    for (const auto& c : cells) guards.push_back(c.guard);
    check_partition(guards, space_->manager());
    ++stats_.partition_checks;
    std::vector<Formula> disjuncts;
    for (const auto& cell : cells) {
      if (cell.bound.is_neg_inf()) continue;
      Formula guard = space_->to_formula(cell.guard);
      if (cell.bound.is_pos_inf()) {
        disjuncts.push_back(guard);
        continue;
      }
      LinExpr lhs;
      lhs.terms = tmpl_.row(i).form;
      disjuncts.push_back(Formula::conj(
          {guard, Formula::compare(lhs, Cmp::Le, LinExpr::num(cell.bound.value()))}));
    }
    rows.push_back(Formula::disj(std::move(disjuncts)));
  }
  return Formula::conj(std::move(rows));
}

Formula Engine::psi2(std::size_t row) {
  auto cells = value_.partition(row);
  std::vector<Bdd> guards;
  for (const auto& c : cells) guards.push_back(c.guard);
  check_partition(guards, space_->manager());
  ++stats_.partition_checks;
  std::vector<Formula> disjuncts;
  for (const auto& cell : cells) {
    if (cell.bound.is_pos_inf()) continue;
    Formula guard = space_->to_formula(space_->prime(cell.guard));
    if (cell.bound.is_neg_inf()) {
      disjuncts.push_back(guard);
      continue;
    }
    LinExpr lhs;
    lhs.terms = tmpl_.primed_row(row, ts_);
    LinExpr rhs = LinExpr::num(cell.bound.value()) + LinExpr::var(delta_);
    disjuncts.push_back(Formula::conj({guard, Formula::compare(lhs, Cmp::Eq, rhs)}));
  }
  return Formula::disj(std::move(disjuncts));
}

Engine::Decoded Engine::decode(const Model& model) const {
  Decoded out;
  for (std::size_t k = 0; k < ts_.n(); ++k) {
    out.from.push_back(bool_of(model, ts_.bools()[k]));
    out.to.push_back(bool_of(model, ts_.primed_bools()[k]));
  }
  for (VarId p : ts_.choices()) out.path.push_back(bool_of(model, p));
  for (VarId v = 0; v < ts_.vocab().size(); ++v) {
    if (!is_boolean(ts_.vocab().sort(v))) {
      out.nums.emplace(v, model.has_num(v) ? model.num_value(v) : Rational(0));
    }
  }
  return out;
}

Bdd Engine::apply_update(std::size_t row, const Bdd& arrivals, const Choice& choice) {
  Bdd target = arrivals;
  if (frozen_[row]) {
    target = space_->manager().zero();
    for (const Bdd& cell : *frozen_[row]) {
      if (!(cell & arrivals).is_false()) target |= cell;
    }
  }
  if (target.is_false()) throw EngineError("empty strategy update");
  if (!(target & updated_[row]).is_false()) {
    throw EngineError("strategy update overlaps states already improved this round");
  }
  strategy_.rows[row] = strategy_.rows[row].assign(target, choice);
  updated_[row] |= target;
  ++stats_.strategy_updates;
  stable_ = false;
  if (on_update) on_update({row, target, choice});
  return target;
}

Bdd Engine::generalize(const Formula& psi, const Model& model, const Bdd& excluded) {
  Decoded hit = decode(model);
  Formula numeric_free = eval_under_numeric(psi, hit.nums);
  std::map<VarId, bool> fixed;
  for (std::size_t k = 0; k < ts_.n(); ++k) fixed.emplace(ts_.bools()[k], hit.from[k]);
  for (std::size_t k = 0; k < ts_.d(); ++k) fixed.emplace(ts_.choices()[k], hit.path[k]);
  for (VarId s : selectors_) fixed.emplace(s, bool_of(model, s));
  Bdd g = space_->to_bdd(substitute_bools(numeric_free, fixed)).minus(excluded);
  if (!g.eval(space_->assignment(hit.to, true))) {
    throw EngineError("generalized set misses the model's own arrival state");
  }
  return g;
}

void Engine::transfer(const Decoded& hit, std::size_t from_row) {
  Bdd arrival = space_->state(hit.to, true);
  std::vector<Rational> next;
  for (VarId v : ts_.primed_nums()) {
    auto it = hit.nums.find(v);
    next.push_back(it == hit.nums.end() ? Rational(0) : it->second);
  }
  for (std::size_t r = 0; r < tmpl_.size(); ++r) {
    if (r == from_row || !(arrival & updated_[r]).is_false()) continue;
    const ExtRational& bound = value_.at(r, hit.to);
    bool improving = bound.is_neg_inf() ||
                     (bound.is_finite() && tmpl_.apply(r, ts_, next) > bound.value());
    if (improving) apply_update(r, arrival, Choice::of(hit.from, hit.path));
  }
}

void Engine::improve_row(std::size_t row, const Formula& psi1) {
  Formula arrive = psi2(row);
  if (arrive.is_false()) return;
  smt_->push();
  smt_->assert_formula(arrive);
  if (!updated_[row].is_false()) smt_->assert_formula(space_->to_formula(updated_[row]).negate());
  Formula positive = Formula::compare(LinExpr::num(Rational(0)), Cmp::Lt, LinExpr::var(delta_));
  Formula psi = Formula::conj({psi1, ts_.transition(), arrive, positive});
  while (true) {
    ++stats_.smt_checks;
    if (smt_->check() == SmtResult::Unsat) break;
    const Model& model = smt_->model();
    Decoded hit = decode(model);
    Bdd blocked;
    switch (config_.variant) {
      case Variant::Naive:
      case Variant::Transfer:
        blocked = apply_update(row, space_->state(hit.to, true), Choice::of(hit.from, hit.path));
        break;
      case Variant::Generalize:
        blocked = apply_update(row, generalize(psi, model, updated_[row]),
                               Choice::of(hit.from, hit.path));
        break;
      case Variant::Full: {
        Formula f = Formula::conj(
            {eval_under_numeric(psi, hit.nums), space_->to_formula(updated_[row]).negate()});
        ModelEnumerator sat(f, ts_.vocab());
        blocked = space_->manager().zero();
        while (true) {
          ++stats_.sat_enumerations;
          auto inner = sat.next();
          if (!inner) break;
          std::map<VarId, bool> fixed;
          std::vector<bool> from;
          std::vector<bool> path;
          auto value = [&](VarId v, bool fallback) {
            auto it = inner->find(v);
            return it == inner->end() ? fallback : it->second;
          };
          for (std::size_t k = 0; k < ts_.n(); ++k) {
            from.push_back(value(ts_.bools()[k], hit.from[k]));
            fixed.emplace(ts_.bools()[k], from.back());
          }
          for (std::size_t k = 0; k < ts_.d(); ++k) {
            path.push_back(value(ts_.choices()[k], hit.path[k]));
            fixed.emplace(ts_.choices()[k], path.back());
          }
          Bdd g = space_->to_bdd(substitute_bools(f, fixed)).minus(updated_[row]);
          if (g.is_false()) throw EngineError("propositional model yields no arrival state");
          Bdd done = apply_update(row, g, Choice::of(std::move(from), std::move(path)));
          sat.block(space_->to_formula(done));
          blocked |= done;
        }
        break;
      }
      case Variant::Symbolic:
        throw EngineError("symbolic variant handled elsewhere");
    }
    smt_->assert_formula(space_->to_formula(blocked).negate());
    if (config_.variant == Variant::Transfer) transfer(hit, row);
  }
  smt_->pop();
}

void Engine::improve_symbolic(const Formula& psi1) {
  (void)psi1;
  auto code = [&](std::size_t row) {
    std::vector<Formula> lits;
    for (std::size_t b = 0; b < selectors_.size(); ++b) {
      lits.push_back(Formula::lit(selectors_[b], ((row >> b) & 1U) != 0));
    }
    return Formula::conj(std::move(lits));
  };
  std::vector<Formula> options;
  for (std::size_t i = 0; i < tmpl_.size(); ++i) options.push_back(Formula::conj({code(i), psi2(i)}));
  Formula any = Formula::disj(std::move(options));
  if (any.is_false()) return;
  smt_->push();
  smt_->assert_formula(any);
  while (true) {
    ++stats_.smt_checks;
    if (smt_->check() == SmtResult::Unsat) break;
    const Model& model = smt_->model();
    std::size_t row = 0;
    for (std::size_t b = 0; b < selectors_.size(); ++b) {
      if (bool_of(model, selectors_[b])) row |= std::size_t{1} << b;
    }
    if (row >= tmpl_.size()) throw EngineError("selector decodes to no template row");
    Decoded hit = decode(model);
    Bdd done = apply_update(row, space_->state(hit.to, true), Choice::of(hit.from, hit.path));
    smt_->assert_formula(Formula::conj({code(row), space_->to_formula(done)}).negate());
  }
  smt_->pop();
}

void Engine::refine_frozen() {
  for (std::size_t i = 0; i < tmpl_.size(); ++i) {
    if (!frozen_[i]) continue;
    std::vector<Bdd> refined;
    for (const auto& cell : value_.partition(i)) {
      Bdd primed = space_->prime(cell.guard);
      for (const Bdd& frozen : *frozen_[i]) {
        Bdd part = frozen & primed;
        if (!part.is_false()) refined.push_back(part);
      }
    }
    frozen_[i] = std::move(refined);
  }
}

bool Engine::improve() {
  refine_frozen();
  stable_ = true;
  updated_.assign(tmpl_.size(), space_->manager().zero());
  Formula departure = psi1();
  smt_->push();
  smt_->assert_formula(departure);
  if (config_.variant == Variant::Symbolic) {
    improve_symbolic(departure);
  } else {
    for (std::size_t i = 0; i < tmpl_.size(); ++i) improve_row(i, departure);
  }
  smt_->pop();
  return !stable_;
}

Bdd Engine::unreachable() {
  Bdd init = space_->init();
  BddManager& m = space_->manager();
  Bdd z = m.zero();
  for (const auto& row : strategy_.rows) {
    z |= space_->unprime(row.preimage([](const Choice& c) { return c.bottom; }));
  }
  z = z.minus(init);
  while (true) {
    Bdd grow = m.zero();
    for (const auto& row : strategy_.rows) {
      grow |= space_->unprime(row.preimage([&](const Choice& c) {
        return !c.bottom && z.eval(space_->assignment(c.state));
      }));
    }
    Bdd next = z | grow.minus(init);
    if (next == z) return z;
    z = next;
  }
}

const PathConjunction& Engine::path(const std::vector<bool>& choice) {
  auto it = paths_.find(choice);
  if (it == paths_.end()) it = paths_.emplace(choice, extract_path_conjunction(ts_, choice)).first;
  return it->second;
}

ExtRational Engine::max_bound(std::size_t row, const Bdd& set) const {
  ExtRational best = ExtRational::neg_inf();
  for (const auto& cell : value_.partition(row)) {
    if (!(cell.guard & set).is_false() && cell.bound > best) best = cell.bound;
  }
  return best;
}

std::vector<std::vector<Engine::Class>> Engine::classes(const Bdd& unreachable) {
  Bdd init = space_->init();
  std::vector<std::vector<Class>> out(tmpl_.size());
  for (std::size_t i = 0; i < tmpl_.size(); ++i) {
    std::vector<Bdd> guards{unreachable};
    for (const auto& [choice, arrivals] : strategy_.rows[i].reverse_image()) {
      Bdd states = space_->unprime(arrivals).minus(unreachable);
      for (const Bdd& part : {states & init, states.minus(init)}) {
        if (part.is_false()) continue;
        out[i].push_back({part, choice, false, ExtRational::neg_inf(), 0});
        guards.push_back(part);
      }
    }
    check_partition(guards, space_->manager());
    ++stats_.partition_checks;
  }
  return out;
}

void Engine::freeze_rows() {
  if (!config_.freeze_class_budget) return;
  Bdd z = unreachable();
  auto current = classes(z);
  for (std::size_t i = 0; i < tmpl_.size(); ++i) {
    if (frozen_[i] || current[i].size() <= *config_.freeze_class_budget) continue;
    std::vector<Bdd> cells;
    for (const auto& cell : value_.partition(i)) cells.push_back(space_->prime(cell.guard));
    Bdd live = strategy_.rows[i].preimage([](const Choice& c) { return !c.bottom; });
    Bdd initial = space_->prime(space_->init());
    for (const Bdd& cell : cells) {
      Bdd source = cell;
      for (const Bdd& preferred : {cell & updated_[i], (cell & live).minus(initial), cell & live}) {
        if (!preferred.is_false()) {
          source = preferred;
          break;
        }
      }
      std::vector<bool> rep = space_->pick(source, true);
      Choice choice = strategy_.rows[i].eval(space_->assignment(rep, true));
      strategy_.rows[i] = strategy_.rows[i].assign(cell, choice);
    }
    frozen_[i] = std::move(cells);
    ++stats_.frozen_rows;
  }
}

void Engine::evaluate() {
  Bdd z = unreachable();
  Bdd init = space_->init();
  auto all = classes(z);
  const auto& x0 = ts_.init_num();

  LpProblem lp;
  std::vector<std::pair<std::size_t, std::size_t>> unknowns;  // (row, class)
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t k = 0; k < all[i].size(); ++k) {
      Class& c = all[i][k];
      bool initial = c.guard.implies(init);
      if (c.choice.bottom || z.eval(space_->assignment(c.choice.state))) {
        if (!initial) throw EngineError("reachable state without a reachable departure");
        c.value = tmpl_.apply(i, ts_, x0);
        continue;
      }
      ExtRational previous = max_bound(i, c.guard);
      if (previous.is_pos_inf()) {
        c.value = previous;
        continue;
      }
      c.unknown = true;
      c.lp_var = lp.add_variable("v" + std::to_string(i) + "_" + std::to_string(k));
      unknowns.emplace_back(i, k);
    }
  }
  stats_.classes = 0;
  for (const auto& row : all) stats_.classes += row.size();

  auto find_class = [&](std::size_t row, const std::vector<bool>& state) -> const Class& {
    auto full = space_->assignment(state);
    for (const auto& c : all[row]) {
      if (c.guard.eval(full)) return c;
    }
    throw EngineError("departure state has no class");
  };

  for (auto [i, k] : unknowns) {
    const Class& c = all[i][k];
    std::map<VarId, std::size_t> local;
    auto lp_var = [&](VarId v) {
      auto it = local.find(v);
      if (it == local.end()) {
        it = local.emplace(v, lp.add_variable(ts_.vocab().name(v) + "#" + std::to_string(c.lp_var)))
                 .first;
      }
      return it->second;
    };
    for (std::size_t j = 0; j < tmpl_.size(); ++j) {
      const Class& from = find_class(j, c.choice.state);
      LinearForm form;
      for (const auto& [v, coeff] : tmpl_.row(j).form) form[lp_var(v)] += coeff;
      if (from.unknown) {
        form[from.lp_var] -= Rational(1);
        lp.add_le(form, Rational(0));
      } else if (from.value.is_finite()) {
        lp.add_le(form, from.value.value());
      } else if (from.value.is_neg_inf()) {
        throw EngineError("departure class bound is -inf");
      }
    }
    LinearForm arrival;
    arrival[c.lp_var] = Rational(1);
    for (const auto& [v, coeff] : tmpl_.primed_row(i, ts_)) arrival[lp_var(v)] -= coeff;
    lp.add_le(arrival, Rational(0));
    for (const Atom& atom : path(c.choice.path).atoms) {
      LinearForm form;
      for (const auto& [v, coeff] : atom.terms) form[lp_var(v)] += coeff;
      lp.add_constraint(form, atom.cmp == Cmp::Eq ? Relation::Eq : Relation::Le, atom.rhs);
    }
    if (c.guard.implies(init)) lp.add_ge({{c.lp_var, Rational(1)}}, tmpl_.apply(i, ts_, x0));
  }
  stats_.lp_unknowns = std::max(stats_.lp_unknowns, unknowns.size());
  stats_.lp_variables = std::max(stats_.lp_variables, lp.num_variables());
  stats_.lp_rows = std::max(stats_.lp_rows, lp.constraints().size());

  if (!unknowns.empty()) {
    LpSession session(lp);
    if (!session.feasible()) throw EngineError("strategy value LP is infeasible");
    for (auto [i, k] : unknowns) {
      Class& c = all[i][k];
      LpOutcome outcome = session.maximize({{c.lp_var, Rational(1)}});
      ++stats_.lp_solves;
      if (outcome.status == LpOutcome::Status::Unbounded) {
        c.value = ExtRational::pos_inf();
      } else if (outcome.optimal() && outcome.value.eps().is_zero()) {
        c.value = outcome.value.real();
      } else {
        throw EngineError("strategy value LP has no exact optimum");
      }
    }
  }

  AbstractValue next;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto row = space_->bounds().constant(ExtRational::neg_inf());
    for (const auto& c : all[i]) row = row.assign(c.guard, c.value);
    next.rows.push_back(row);
  }
  bool increased = false;
  for (std::size_t i = 0; i < next.rows.size(); ++i) {
    bool above = forall_pairs(value_.rows[i], next.rows[i],
                              [](const ExtRational& a, const ExtRational& b) { return a <= b; });
    if (!above) throw EngineError("strategy value decreased a bound");
    if (!(value_.rows[i] == next.rows[i])) increased = true;
  }
  if (!increased) throw EngineError("strategy value did not increase any bound");
  value_ = std::move(next);
}

void Engine::run() {
  auto start = std::chrono::steady_clock::now();
  while (true) {
    if (stats_.iterations >= config_.iteration_cap) {
      throw IterationCapError("iteration cap of " + std::to_string(config_.iteration_cap) +
                              " rounds exceeded");
    }
    if (!improve()) break;
    freeze_rows();
    evaluate();
    ++stats_.iterations;
    if (on_round) on_round(stats_.iterations, value_);
  }
  stats_.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace maxstrat
