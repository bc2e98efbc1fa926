#include "maxstrat/sat.hpp"

#include <algorithm>

#include "maxstrat/errors.hpp"

namespace maxstrat {

namespace {

double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  double result = 1;
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  for (int k = 0; k < seq; ++k) result *= y;
  return result;
}

}  // namespace

int SatSolver::new_var() {
  int var = num_vars();
  assigns_.push_back(kUndef);
  level_.push_back(0);
  reason_.push_back(-1);
  phase_.push_back(false);
  activity_.push_back(0.0);
  in_order_.push_back(true);
  seen_.push_back(false);
  watches_.emplace_back();
  watches_.emplace_back();
  order_.emplace(-0.0, var);
  return var;
}

std::int8_t SatSolver::lit_value(Lit lit) const {
  std::int8_t v = assigns_[static_cast<std::size_t>(lit_var(lit))];
  if (v == kUndef) return kUndef;
  return lit_positive(lit) ? v : static_cast<std::int8_t>(1 - v);
}

void SatSolver::enqueue(Lit lit, int reason) {
  auto var = static_cast<std::size_t>(lit_var(lit));
  assigns_[var] = lit_positive(lit) ? kTrue : kFalse;
  level_[var] = decision_level();
  reason_[var] = reason;
  trail_.push_back(lit);
}

void SatSolver::attach(int clause) {
  const auto& c = clauses_[static_cast<std::size_t>(clause)];
  watches_[static_cast<std::size_t>(c[0])].push_back(clause);
  watches_[static_cast<std::size_t>(c[1])].push_back(clause);
}

void SatSolver::add_clause(std::vector<Lit> clause) {
  if (unsat_) return;
  backtrack(0);
  std::sort(clause.begin(), clause.end());
  clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
  std::vector<Lit> kept;
  for (std::size_t k = 0; k < clause.size(); ++k) {
    if (lit_var(clause[k]) >= num_vars()) throw UsageError("sat clause uses an unknown variable");
    if (k + 1 < clause.size() && clause[k + 1] == negate(clause[k])) return;  // tautology
    std::int8_t v = lit_value(clause[k]);
    if (v == kTrue) return;
    if (v == kUndef) kept.push_back(clause[k]);
  }
  if (kept.empty()) {
    unsat_ = true;
    return;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], -1);
    if (propagate() >= 0) unsat_ = true;
    return;
  }
  clauses_.push_back(std::move(kept));
  attach(static_cast<int>(clauses_.size() - 1));
}

int SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit false_lit = negate(p);
    auto& ws = watches_[static_cast<std::size_t>(false_lit)];
    std::size_t keep = 0;
    for (std::size_t k = 0; k < ws.size(); ++k) {
      int ci = ws[k];
      auto& c = clauses_[static_cast<std::size_t>(ci)];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == kTrue) {
        ws[keep++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t j = 2; j < c.size(); ++j) {
        if (lit_value(c[j]) != kFalse) {
          std::swap(c[1], c[j]);
          watches_[static_cast<std::size_t>(c[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[keep++] = ci;
      if (lit_value(c[0]) == kFalse) {
        for (std::size_t j = k + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
        ws.resize(keep);
        qhead_ = trail_.size();
        return ci;
      }
      enqueue(c[0], ci);
    }
    ws.resize(keep);
  }
  return -1;
}

void SatSolver::bump(int var) {
  auto v = static_cast<std::size_t>(var);
  if (in_order_[v]) order_.erase({-activity_[v], var});
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    std::set<std::pair<double, int>> rebuilt;
    for (std::size_t k = 0; k < activity_.size(); ++k) {
      activity_[k] *= 1e-100;
      if (in_order_[k] && k != v) rebuilt.emplace(-activity_[k], static_cast<int>(k));
    }
    order_ = std::move(rebuilt);
    var_inc_ *= 1e-100;
  }
  if (in_order_[v]) order_.emplace(-activity_[v], var);
}

void SatSolver::analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  learnt.assign(1, 0);
  int pending = 0;
  Lit p = -1;
  std::size_t index = trail_.size();
  int ci = conflict;
  do {
    const auto& c = clauses_[static_cast<std::size_t>(ci)];
    for (std::size_t j = (p == -1 ? 0 : 1); j < c.size(); ++j) {
      Lit q = c[j];
      auto v = static_cast<std::size_t>(lit_var(q));
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = true;
      bump(lit_var(q));
      if (level_[v] >= decision_level()) {
        ++pending;
      } else {
        learnt.push_back(q);
      }
    }
    do {
      --index;
    } while (!seen_[static_cast<std::size_t>(lit_var(trail_[index]))]);
    p = trail_[index];
    ci = reason_[static_cast<std::size_t>(lit_var(p))];
    seen_[static_cast<std::size_t>(lit_var(p))] = false;
    --pending;
    if (pending > 0 && ci >= 0) {
      // reason clauses keep the implied literal first
      auto& rc = clauses_[static_cast<std::size_t>(ci)];
      if (rc[0] != p) {
        auto it = std::find(rc.begin(), rc.end(), p);
        std::swap(*rc.begin(), *it);
      }
    }
  } while (pending > 0);
  learnt[0] = negate(p);
  backtrack_level = 0;
  std::size_t max_index = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    int lvl = level_[static_cast<std::size_t>(lit_var(learnt[k]))];
    if (lvl > backtrack_level) {
      backtrack_level = lvl;
      max_index = k;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_index]);
  for (Lit q : learnt) seen_[static_cast<std::size_t>(lit_var(q))] = false;
  var_inc_ *= 1.0 / 0.95;
}

void SatSolver::backtrack(int level) {
  if (decision_level() <= level) return;
  std::size_t stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);
  for (std::size_t k = trail_.size(); k-- > stop;) {
    auto v = static_cast<std::size_t>(lit_var(trail_[k]));
    phase_[v] = lit_positive(trail_[k]);
    assigns_[v] = kUndef;
    reason_[v] = -1;
    if (!in_order_[v]) {
      in_order_[v] = true;
      order_.emplace(-activity_[v], static_cast<int>(v));
    }
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

int SatSolver::pick_branch_var() {
  while (!order_.empty()) {
    auto it = order_.begin();
    int var = it->second;
    order_.erase(it);
    in_order_[static_cast<std::size_t>(var)] = false;
    if (assigns_[static_cast<std::size_t>(var)] == kUndef) return var;
  }
  return -1;
}

SatSolver::Result SatSolver::solve(const std::vector<Lit>& assumptions) {
  if (unsat_) return Result::Unsat;
  backtrack(0);
  if (propagate() >= 0) {
    unsat_ = true;
    return Result::Unsat;
  }
  std::uint64_t conflicts_here = 0;
  int restart_round = 0;
  double restart_limit = 100 * luby(2, restart_round);
  std::uint64_t since_restart = 0;
  std::vector<Lit> learnt;
  while (true) {
    int conflict = propagate();
    if (conflict >= 0) {
      ++total_conflicts_;
      ++conflicts_here;
      ++since_restart;
      if (conflicts_here > conflict_budget_) throw ResourceError("sat conflict budget exhausted");
      if (decision_level() == 0) {
        unsat_ = true;
        return Result::Unsat;
      }
      int backtrack_level = 0;
      analyze(conflict, learnt, backtrack_level);
      backtrack(backtrack_level);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        clauses_.push_back(learnt);
        int ci = static_cast<int>(clauses_.size() - 1);
        attach(ci);
        enqueue(learnt[0], ci);
      }
      continue;
    }
    if (static_cast<double>(since_restart) >= restart_limit) {
      since_restart = 0;
      restart_limit = 100 * luby(2, ++restart_round);
      backtrack(0);
      continue;
    }
    Lit next = -1;
    while (decision_level() < static_cast<int>(assumptions.size())) {
      Lit a = assumptions[static_cast<std::size_t>(decision_level())];
      std::int8_t v = lit_value(a);
      if (v == kTrue) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (v == kFalse) {
        backtrack(0);
        return Result::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next == -1) {
      int var = pick_branch_var();
      if (var < 0) {
        model_.assign(assigns_.size(), false);
        for (std::size_t k = 0; k < assigns_.size(); ++k) model_[k] = assigns_[k] == kTrue;
        backtrack(0);
        return Result::Sat;
      }
      next = make_lit(var, phase_[static_cast<std::size_t>(var)]);
    }
    ++total_decisions_;
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, -1);
  }
}

}  // namespace maxstrat
