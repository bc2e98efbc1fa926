#include "maxstrat/oracle.hpp"

#include <sstream>

#include "maxstrat/errors.hpp"
#include "maxstrat/lp.hpp"
#include "maxstrat/smt.hpp"

namespace maxstrat::oracle {

namespace {

struct Entry {
  std::size_t from = 0;
  std::vector<bool> path;
};

using Strategy = std::vector<std::vector<std::optional<Entry>>>;

std::size_t state_count(const TransitionSystem& ts) { return std::size_t{1} << ts.n(); }

std::string state_name(const TransitionSystem& ts, const std::vector<bool>& bits) {
  std::string out;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (k) out += "&";
    out += (bits[k] ? "" : "!") + ts.vocab().name(ts.bools()[k]);
  }
  return out.empty() ? "*" : out;
}

Formula state_formula(const TransitionSystem& ts, std::size_t index, bool primed) {
  std::vector<Formula> lits;
  auto bits = state_bits(index, ts.n());
  for (std::size_t k = 0; k < ts.n(); ++k) {
    lits.push_back(Formula::lit(primed ? ts.primed_bools()[k] : ts.bools()[k], bits[k]));
  }
  return Formula::conj(std::move(lits));
}

LinExpr row_expr(const Template& tmpl, const TransitionSystem& ts, std::size_t row, bool primed) {
  LinExpr e;
  e.terms = primed ? tmpl.primed_row(row, ts) : tmpl.row(row).form;
  return e;
}

bool empty_state(const BoundTable& table, std::size_t s) {
  for (const auto& row : table) {
    if (row[s].is_neg_inf()) return true;
  }
  return false;
}

// Some state of the candidate, with the numeric part inside its polyhedron.
Formula departure(const TransitionSystem& ts, const Template& tmpl, const BoundTable& table) {
  std::vector<Formula> states;
  for (std::size_t s = 0; s < state_count(ts); ++s) {
    if (empty_state(table, s)) continue;
    std::vector<Formula> parts{state_formula(ts, s, false)};
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!table[i][s].is_finite()) continue;
      parts.push_back(Formula::compare(row_expr(tmpl, ts, i, false), Cmp::Le,
                                       LinExpr::num(table[i][s].value())));
    }
    states.push_back(Formula::conj(std::move(parts)));
  }
  return Formula::disj(std::move(states));
}

// Arrival in state `s` strictly above the row bound; nullopt when the bound is +inf.
std::optional<Formula> escape(const TransitionSystem& ts, const Template& tmpl,
                              const BoundTable& table, std::size_t row, std::size_t s) {
  const ExtRational& c = table[row][s];
  if (c.is_pos_inf()) return std::nullopt;
  Formula at = state_formula(ts, s, true);
  if (c.is_neg_inf()) return at;
  return Formula::conj(
      {at, Formula::compare(LinExpr::num(c.value()), Cmp::Lt, row_expr(tmpl, ts, row, true))});
}

std::vector<bool> read_bools(const Model& model, const std::vector<VarId>& vars) {
  std::vector<bool> out;
  for (VarId v : vars) out.push_back(model.has_bool(v) && model.bool_value(v));
  return out;
}

BoundTable initial_table(const TransitionSystem& ts, const Template& tmpl) {
  BoundTable table(tmpl.size(), std::vector<ExtRational>(state_count(ts), ExtRational::neg_inf()));
  for (std::size_t s = 0; s < state_count(ts); ++s) {
    if (!ts.is_initial(state_bits(s, ts.n()))) continue;
    for (std::size_t i = 0; i < tmpl.size(); ++i) table[i][s] = tmpl.apply(i, ts, ts.init_num());
  }
  return table;
}

std::vector<bool> unreachable(const TransitionSystem& ts, const Strategy& strategy) {
  std::size_t count = state_count(ts);
  std::vector<bool> z(count, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < count; ++s) {
      if (z[s] || ts.is_initial(state_bits(s, ts.n()))) continue;
      for (const auto& row : strategy) {
        if (!row[s] || z[row[s]->from]) {
          z[s] = true;
          changed = true;
          break;
        }
      }
    }
  }
  return z;
}

BoundTable strategy_value(const TransitionSystem& ts, const Template& tmpl,
                          const BoundTable& previous, const Strategy& strategy) {
  std::size_t count = state_count(ts);
  auto z = unreachable(ts, strategy);
  BoundTable next(tmpl.size(), std::vector<ExtRational>(count, ExtRational::neg_inf()));
  std::vector<std::vector<std::optional<std::size_t>>> unknown(
      tmpl.size(), std::vector<std::optional<std::size_t>>(count));
  LpProblem lp;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    for (std::size_t s = 0; s < count; ++s) {
      if (z[s]) continue;
      const auto& entry = strategy[i][s];
      if (!entry || z[entry->from]) {
        next[i][s] = tmpl.apply(i, ts, ts.init_num());
      } else if (previous[i][s].is_pos_inf()) {
        next[i][s] = ExtRational::pos_inf();
      } else {
        unknown[i][s] = lp.add_variable("v" + std::to_string(i) + "_" + std::to_string(s));
      }
    }
  }
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    for (std::size_t s = 0; s < count; ++s) {
      if (!unknown[i][s]) continue;
      const Entry& entry = *strategy[i][s];
      std::size_t v = *unknown[i][s];
      std::map<VarId, std::size_t> copy;
      auto col = [&](VarId var) {
        auto it = copy.find(var);
        if (it == copy.end()) {
          it = copy.emplace(var, lp.add_variable(ts.vocab().name(var) + "@" + std::to_string(v)))
                   .first;
        }
        return it->second;
      };
      for (std::size_t j = 0; j < tmpl.size(); ++j) {
        LinearForm form;
        for (const auto& [var, coeff] : tmpl.row(j).form) form[col(var)] += coeff;
        if (unknown[j][entry.from]) {
          form[*unknown[j][entry.from]] -= Rational(1);
          lp.add_le(form, Rational(0));
        } else if (next[j][entry.from].is_finite()) {
          lp.add_le(form, next[j][entry.from].value());
        }
      }
      for (const Atom& atom : extract_path_conjunction(ts, entry.path).atoms) {
        LinearForm form;
        for (const auto& [var, coeff] : atom.terms) form[col(var)] += coeff;
        lp.add_constraint(form, atom.cmp == Cmp::Eq ? Relation::Eq : Relation::Le, atom.rhs);
      }
      LinearForm arrival{{v, Rational(1)}};
      for (const auto& [var, coeff] : tmpl.primed_row(i, ts)) arrival[col(var)] -= coeff;
      lp.add_le(arrival, Rational(0));
      if (ts.is_initial(state_bits(s, ts.n()))) {
        lp.add_ge({{v, Rational(1)}}, tmpl.apply(i, ts, ts.init_num()));
      }
    }
  }
  if (lp.num_variables() == 0) return next;
  LpSession session(lp);
  if (!session.feasible()) throw EngineError("explicit strategy LP is infeasible");
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    for (std::size_t s = 0; s < count; ++s) {
      if (!unknown[i][s]) continue;
      LpOutcome out = session.maximize({{*unknown[i][s], Rational(1)}});
      if (out.status == LpOutcome::Status::Unbounded) {
        next[i][s] = ExtRational::pos_inf();
      } else if (out.optimal() && out.value.eps().is_zero()) {
        next[i][s] = out.value.real();
      } else {
        throw EngineError("explicit strategy LP has no exact optimum");
      }
    }
  }
  return next;
}

}  // namespace

BoundTable iterate_explicit(const TransitionSystem& ts, const Template& tmpl,
                            std::size_t round_cap) {
  if (ts.n() > kMaxBools) {
    throw UsageError("explicit oracle supports at most " + std::to_string(kMaxBools) +
                     " Boolean state variables");
  }
  std::size_t count = state_count(ts);
  BoundTable table = initial_table(ts, tmpl);
  Strategy strategy(tmpl.size(), std::vector<std::optional<Entry>>(count));
  for (std::size_t round = 0;; ++round) {
    if (round >= round_cap) throw IterationCapError("explicit oracle exceeded its round cap");
    InternalSmt smt(ts.vocab());
    smt.assert_formula(Formula::conj({departure(ts, tmpl, table), ts.transition()}));
    bool improved = false;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
      for (std::size_t s = 0; s < count; ++s) {
        auto out = escape(ts, tmpl, table, i, s);
        if (!out) continue;
        smt.push();
        smt.assert_formula(*out);
        if (smt.check() == SmtResult::Sat) {
          strategy[i][s] = Entry{state_index(read_bools(smt.model(), ts.bools())),
                                 read_bools(smt.model(), ts.choices())};
          improved = true;
        }
        smt.pop();
      }
    }
    if (!improved) return table;
    BoundTable next = strategy_value(ts, tmpl, table, strategy);
    bool increased = false;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
      for (std::size_t s = 0; s < count; ++s) {
        if (next[i][s] < table[i][s]) throw EngineError("explicit iteration decreased a bound");
        if (next[i][s] != table[i][s]) increased = true;
      }
    }
    if (!increased) throw EngineError("explicit iteration made no progress");
    table = std::move(next);
  }
}

std::string Counterexample::str(const TransitionSystem& ts) const {
  std::ostringstream out;
  if (initial) {
    out << "initial state " << state_name(ts, from) << " lies outside row " << row + 1;
    return out.str();
  }
  out << "row " << row + 1 << ": " << state_name(ts, from) << " -> " << state_name(ts, to);
  for (const auto& [var, value] : nums) {
    Sort sort = ts.vocab().sort(var);
    if (sort == Sort::Num || sort == Sort::PrimedNum || sort == Sort::InputNum) {
      out << " " << ts.vocab().name(var) << "=" << value.str();
    }
  }
  return out.str();
}

InductiveReport check_inductive(const TransitionSystem& ts, const Template& tmpl,
                                const BoundTable& table) {
  std::size_t count = state_count(ts);
  for (std::size_t s = 0; s < count; ++s) {
    auto bits = state_bits(s, ts.n());
    if (!ts.is_initial(bits)) continue;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
      if (ExtRational(tmpl.apply(i, ts, ts.init_num())) > table[i][s]) {
        Counterexample c;
        c.initial = true;
        c.row = i;
        c.from = bits;
        return {c};
      }
    }
  }
  InternalSmt smt(ts.vocab());
  smt.assert_formula(Formula::conj({departure(ts, tmpl, table), ts.transition()}));
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    for (std::size_t s = 0; s < count; ++s) {
      auto out = escape(ts, tmpl, table, i, s);
      if (!out) continue;
      smt.push();
      smt.assert_formula(*out);
      bool sat = smt.check() == SmtResult::Sat;
      if (sat) {
        const Model& m = smt.model();
        Counterexample c;
        c.row = i;
        c.from = read_bools(m, ts.bools());
        c.to = read_bools(m, ts.primed_bools());
        c.path = read_bools(m, ts.choices());
        c.nums = m.nums();
        return {c};
      }
      smt.pop();
    }
  }
  return {};
}

std::vector<ProbedCell> finite_cells(const BoundTable& table) {
  std::vector<ProbedCell> out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::map<Rational, std::vector<std::size_t>> groups;
    for (std::size_t s = 0; s < table[i].size(); ++s) {
      if (table[i][s].is_finite()) groups[table[i][s].value()].push_back(s);
    }
    for (auto& [bound, states] : groups) out.push_back({i, std::move(states), bound});
  }
  return out;
}

MinimalityReport probe_minimality(const TransitionSystem& ts, const Template& tmpl,
                                  const BoundTable& table) {
  MinimalityReport report;
  for (const ProbedCell& cell : finite_cells(table)) {
    BoundTable lowered = table;
    for (std::size_t s : cell.states) lowered[cell.row][s] = cell.bound - Rational(1);
    ++report.probed;
    if (check_inductive(ts, tmpl, lowered).sound()) report.still_inductive.push_back(cell);
  }
  return report;
}

std::string diff(const TransitionSystem& ts, const Template& tmpl, const BoundTable& expected,
                 const BoundTable& actual) {
  std::ostringstream out;
  if (expected.size() != actual.size()) return "row counts differ\n";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    for (std::size_t s = 0; s < expected[i].size() && s < actual[i].size(); ++s) {
      if (expected[i][s] == actual[i][s]) continue;
      out << "row " << i + 1 << " (" << tmpl.row(i).label << ") at "
          << state_name(ts, state_bits(s, ts.n())) << ": expected " << expected[i][s].str()
          << ", got " << actual[i][s].str() << "\n";
    }
  }
  return out.str();
}

}  // namespace maxstrat::oracle
