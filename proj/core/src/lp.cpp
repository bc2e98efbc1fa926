#include "maxstrat/lp.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "maxstrat/errors.hpp"

namespace maxstrat {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

LinearForm negated(LinearForm form) {
  for (auto& [var, coeff] : form) coeff = -coeff;
  return form;
}

void add_term(std::map<std::size_t, Rational>& row, std::size_t var,
              const Rational& coeff) {
  auto [it, fresh] = row.emplace(var, coeff);
  if (!fresh) {
    it->second += coeff;
    if (it->second.is_zero()) row.erase(it);
  }
}

}  // namespace

std::size_t LpProblem::add_variable(std::string name) {
  names_.push_back(std::move(name));
  return names_.size() - 1;
}

void LpProblem::check_form(const LinearForm& form) const {
  for (const auto& [var, coeff] : form) {
    if (var >= names_.size()) throw UsageError("lp row references an undeclared variable");
  }
}

std::size_t LpProblem::add_constraint(LinearForm form, Relation relation,
                                      EpsRational rhs) {
  check_form(form);
  std::erase_if(form, [](const auto& term) { return term.second.is_zero(); });
  constraints_.push_back({std::move(form), relation, std::move(rhs)});
  return constraints_.size() - 1;
}

std::size_t LpProblem::add_le(LinearForm form, Rational rhs) {
  return add_constraint(std::move(form), Relation::Le, EpsRational(std::move(rhs)));
}

std::size_t LpProblem::add_lt(LinearForm form, Rational rhs) {
  return add_constraint(std::move(form), Relation::Le,
                        EpsRational(std::move(rhs), Rational(-1)));
}

std::size_t LpProblem::add_ge(LinearForm form, Rational rhs) {
  return add_le(negated(std::move(form)), -rhs);
}

std::size_t LpProblem::add_gt(LinearForm form, Rational rhs) {
  return add_lt(negated(std::move(form)), -rhs);
}

std::size_t LpProblem::add_eq(LinearForm form, Rational rhs) {
  return add_constraint(std::move(form), Relation::Eq, EpsRational(std::move(rhs)));
}

std::string LpProblem::dump() const {
  std::ostringstream out;
  auto form_str = [&](const LinearForm& form) {
    if (form.empty()) return std::string("0");
    std::string s;
    bool first = true;
    for (const auto& [var, coeff] : form) {
      if (!first) s += " + ";
      s += coeff.str() + " " + names_[var];
      first = false;
    }
    return s;
  };
  out << "vars";
  for (const auto& name : names_) out << " " << name;
  out << "\nmaximize " << form_str(objective_) << "\n";
  for (std::size_t r = 0; r < constraints_.size(); ++r) {
    const auto& c = constraints_[r];
    out << "c" << r << ": " << form_str(c.form)
        << (c.relation == Relation::Eq ? " = " : " <= ") << c.rhs.str() << "\n";
  }
  return out.str();
}

EpsRational evaluate(const LinearForm& form, const std::vector<EpsRational>& values) {
  EpsRational sum;
  for (const auto& [var, coeff] : form) sum += values.at(var) * coeff;
  return sum;
}

Rational evaluate(const LinearForm& form, const std::vector<Rational>& values) {
  Rational sum;
  for (const auto& [var, coeff] : form) sum += values.at(var) * coeff;
  return sum;
}

LpSession::LpSession(const LpProblem& problem)
    : problem_(&problem), num_original_(problem.num_variables()) {
  const auto& constraints = problem.constraints();
  std::size_t total = num_original_ + constraints.size();
  value_.assign(total, EpsRational());
  lower_.assign(total, std::nullopt);
  upper_.assign(total, std::nullopt);
  row_of_var_.assign(total, kNone);
  for (std::size_t r = 0; r < constraints.size(); ++r) {
    std::size_t slack = num_original_ + r;
    rows_.push_back(constraints[r].form);
    basic_of_row_.push_back(slack);
    row_of_var_[slack] = r;
    upper_[slack] = constraints[r].rhs;
    if (constraints[r].relation == Relation::Eq) lower_[slack] = constraints[r].rhs;
  }
}

bool LpSession::below_lower(std::size_t var) const {
  return lower_[var] && value_[var] < *lower_[var];
}

bool LpSession::above_upper(std::size_t var) const {
  return upper_[var] && value_[var] > *upper_[var];
}

bool LpSession::can_increase(std::size_t var) const {
  return !upper_[var] || value_[var] < *upper_[var];
}

bool LpSession::can_decrease(std::size_t var) const {
  return !lower_[var] || value_[var] > *lower_[var];
}

void LpSession::pivot(std::size_t row, std::size_t entering) {
  std::size_t leaving = basic_of_row_[row];
  Row old_row = std::move(rows_[row]);
  Rational pivot_coeff = old_row.at(entering);
  Row new_row;
  for (const auto& [var, coeff] : old_row) {
    if (var != entering) new_row.emplace(var, -coeff / pivot_coeff);
  }
  new_row.emplace(leaving, Rational(1) / pivot_coeff);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (r == row) continue;
    auto it = rows_[r].find(entering);
    if (it == rows_[r].end()) continue;
    Rational scale = it->second;
    rows_[r].erase(it);
    for (const auto& [var, coeff] : new_row) add_term(rows_[r], var, scale * coeff);
  }
  rows_[row] = std::move(new_row);
  basic_of_row_[row] = entering;
  row_of_var_[entering] = row;
  row_of_var_[leaving] = kNone;
}

void LpSession::update_nonbasic(std::size_t var, const EpsRational& value) {
  EpsRational delta = value - value_[var];
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    auto it = rows_[r].find(var);
    if (it != rows_[r].end()) value_[basic_of_row_[r]] += delta * it->second;
  }
  value_[var] = value;
}

void LpSession::pivot_and_update(std::size_t row, std::size_t entering,
                                 const EpsRational& value) {
  std::size_t leaving = basic_of_row_[row];
  EpsRational theta = (value - value_[leaving]) / rows_[row].at(entering);
  value_[leaving] = value;
  value_[entering] += theta;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (r == row) continue;
    auto it = rows_[r].find(entering);
    if (it != rows_[r].end()) value_[basic_of_row_[r]] += theta * it->second;
  }
  pivot(row, entering);
}

bool LpSession::feasible() {
  if (feasible_) return *feasible_;
  while (true) {
    std::size_t violated = kNone;
    for (std::size_t var = 0; var < value_.size(); ++var) {
      if (row_of_var_[var] != kNone && (below_lower(var) || above_upper(var))) {
        violated = var;
        break;
      }
    }
    if (violated == kNone) {
      verify(nullptr, nullptr);
      feasible_ = true;
      return true;
    }
    std::size_t row = row_of_var_[violated];
    bool raise = below_lower(violated);
    std::size_t entering = kNone;
    for (const auto& [var, coeff] : rows_[row]) {
      bool up = (coeff.sign() > 0) == raise;
      if (up ? can_increase(var) : can_decrease(var)) {
        entering = var;
        break;
      }
    }
    if (entering == kNone) {
      conflict_.clear();
      conflict_.push_back(violated - num_original_);
      for (const auto& [var, coeff] : rows_[row]) {
        if (var >= num_original_) conflict_.push_back(var - num_original_);
      }
      std::sort(conflict_.begin(), conflict_.end());
      feasible_ = false;
      return false;
    }
    pivot_and_update(row, entering, raise ? *lower_[violated] : *upper_[violated]);
  }
}

std::vector<EpsRational> LpSession::values() const {
  return {value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(num_original_)};
}

LpOutcome LpSession::maximize(const LinearForm& objective) {
  if (!feasible()) throw UsageError("maximize on an infeasible lp");
  while (true) {
    Row reduced;
    for (const auto& [var, coeff] : objective) {
      if (var >= num_original_) throw UsageError("objective references a non-variable");
      if (row_of_var_[var] == kNone) {
        add_term(reduced, var, coeff);
      } else {
        for (const auto& [k, a] : rows_[row_of_var_[var]]) add_term(reduced, k, coeff * a);
      }
    }
    std::size_t entering = kNone;
    int direction = 0;
    for (const auto& [var, d] : reduced) {
      if (d.sign() > 0 && can_increase(var)) {
        entering = var;
        direction = 1;
        break;
      }
      if (d.sign() < 0 && can_decrease(var)) {
        entering = var;
        direction = -1;
        break;
      }
    }
    if (entering == kNone) {
      LpOutcome out;
      out.status = LpOutcome::Status::Optimal;
      out.witness = values();
      out.value = evaluate(objective, out.witness);
      verify(&objective, &out.value);
      return out;
    }

    std::optional<EpsRational> best;
    std::size_t leaving = kNone;
    auto offer = [&](const EpsRational& theta, std::size_t var) {
      if (!best || theta < *best || (theta == *best && var < leaving)) {
        best = theta;
        leaving = var;
      }
    };
    if (direction > 0 && upper_[entering]) offer(*upper_[entering] - value_[entering], entering);
    if (direction < 0 && lower_[entering]) offer(value_[entering] - *lower_[entering], entering);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      auto it = rows_[r].find(entering);
      if (it == rows_[r].end()) continue;
      std::size_t basic = basic_of_row_[r];
      Rational rate = direction > 0 ? it->second : -it->second;
      if (rate.sign() > 0 && upper_[basic]) {
        offer((*upper_[basic] - value_[basic]) / rate, basic);
      } else if (rate.sign() < 0 && lower_[basic]) {
        offer((*lower_[basic] - value_[basic]) / rate, basic);
      }
    }
    if (!best) {
      LpOutcome out;
      out.status = LpOutcome::Status::Unbounded;
      return out;
    }
    if (leaving == entering) {
      EpsRational step = direction > 0 ? *best : -*best;
      update_nonbasic(entering, value_[entering] + step);
    } else {
      std::size_t row = row_of_var_[leaving];
      Rational rate = rows_[row].at(entering);
      if (direction < 0) rate = -rate;
      pivot_and_update(row, entering, rate.sign() > 0 ? *upper_[leaving] : *lower_[leaving]);
    }
  }
}

void LpSession::verify(const LinearForm* objective, const EpsRational* value) const {
  std::vector<EpsRational> point = values();
  for (const auto& c : problem_->constraints()) {
    EpsRational lhs = evaluate(c.form, point);
    bool ok = c.relation == Relation::Eq ? lhs == c.rhs : lhs <= c.rhs;
    if (!ok) throw Error("simplex witness violates a constraint");
  }
  if (objective != nullptr && evaluate(*objective, point) != *value) {
    throw Error("simplex witness does not attain the reported optimum");
  }
}

LpOutcome lp_maximize(const LpProblem& problem) {
  LpSession session(problem);
  if (!session.feasible()) return {};
  return session.maximize(problem.objective());
}

StrictFeasibility lp_feasible_strict(const LpProblem& problem) {
  LpSession session(problem);
  StrictFeasibility out;
  if (!session.feasible()) {
    out.conflict = session.conflict();
    return out;
  }
  std::vector<EpsRational> point = session.values();
  Rational epsilon(1);
  for (const auto& c : problem.constraints()) {
    if (c.relation != Relation::Le) continue;
    EpsRational lhs = evaluate(c.form, point);
    if (lhs.real() < c.rhs.real() && lhs.eps() > c.rhs.eps()) {
      Rational limit = (c.rhs.real() - lhs.real()) / (lhs.eps() - c.rhs.eps());
      if (limit < epsilon) epsilon = limit;
    }
  }
  out.witness.reserve(point.size());
  for (const auto& v : point) out.witness.push_back(v.instantiate(epsilon));
  for (const auto& c : problem.constraints()) {
    Rational lhs = evaluate(c.form, out.witness);
    Rational rhs = c.rhs.instantiate(epsilon);
    bool ok = c.relation == Relation::Eq ? lhs == rhs : lhs <= rhs;
    if (!ok) throw Error("instantiated witness violates a constraint");
  }
  out.sat = true;
  return out;
}

}  // namespace maxstrat
