#pragma once

#include <random>
#include <vector>

#include "maxstrat/formula.hpp"
#include "maxstrat/lp.hpp"

namespace oracle_support {

using namespace maxstrat;

/// Random NNF formula over the given Boolean and numeric variables.
inline Formula random_formula(std::mt19937& rng, const std::vector<VarId>& bools,
                              const std::vector<VarId>& nums, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 3);
  int op = pick(rng);
  if (op == 0 || nums.empty()) {
    if (bools.empty()) return Formula::top();
    std::uniform_int_distribution<std::size_t> v(0, bools.size() - 1);
    return Formula::lit(bools[v(rng)], std::bernoulli_distribution(0.5)(rng));
  }
  if (op == 1) {
    std::uniform_int_distribution<int> coeff(-2, 2), rhs(-4, 4), cmp(0, 2);
    LinExpr lhs;
    for (VarId v : nums) lhs = lhs + LinExpr::var(v, Rational(coeff(rng)));
    if (lhs.terms.empty()) lhs = LinExpr::var(nums.front());
    return Formula::compare(lhs, static_cast<Cmp>(cmp(rng)), LinExpr::num(Rational(rhs(rng))));
  }
  std::uniform_int_distribution<int> arity(2, 3);
  std::vector<Formula> kids;
  int k = arity(rng);
  for (int j = 0; j < k; ++j) kids.push_back(random_formula(rng, bools, nums, depth - 1));
  return op == 2 ? Formula::conj(kids) : Formula::disj(kids);
}

/// Disjunctive normal form of a propositional-free positive combination of
/// atoms (literals must already be substituted away).
inline std::vector<std::vector<Atom>> atom_dnf(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::True:
      return {{}};
    case Formula::Kind::False:
      return {};
    case Formula::Kind::Atom:
      return {{f.atom_value()}};
    case Formula::Kind::Or: {
      std::vector<std::vector<Atom>> out;
      for (const auto& c : f.children()) {
        auto part = atom_dnf(c);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    case Formula::Kind::And: {
      std::vector<std::vector<Atom>> acc{{}};
      for (const auto& c : f.children()) {
        auto part = atom_dnf(c);
        std::vector<std::vector<Atom>> next;
        for (const auto& a : acc) {
          for (const auto& b : part) {
            auto merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            next.push_back(std::move(merged));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    case Formula::Kind::Lit:
      break;
  }
  throw std::logic_error("literal left in atom_dnf input");
}

inline bool cube_feasible(const std::vector<Atom>& cube) {
  LpProblem lp;
  std::map<VarId, std::size_t> col;
  for (const auto& a : cube) {
    LinearForm form;
    for (const auto& [v, c] : a.terms) {
      auto [it, fresh] = col.emplace(v, lp.num_variables());
      if (fresh) lp.add_variable("v" + std::to_string(v));
      form.emplace(it->second, c);
    }
    if (a.cmp == Cmp::Le) lp.add_le(form, a.rhs);
    if (a.cmp == Cmp::Lt) lp.add_lt(form, a.rhs);
    if (a.cmp == Cmp::Eq) lp.add_eq(form, a.rhs);
  }
  return lp_feasible_strict(lp).sat;
}

/// Satisfiability by enumerating every Boolean assignment and checking the
/// resulting atom DNF cube by cube.
inline bool brute_force_sat(const Formula& f, const std::vector<VarId>& bools) {
  for (unsigned code = 0; code < (1U << bools.size()); ++code) {
    std::map<VarId, bool> values;
    for (std::size_t k = 0; k < bools.size(); ++k) values[bools[k]] = (code >> k) & 1U;
    Formula g = substitute_bools(f, values);
    for (const auto& cube : atom_dnf(g)) {
      if (cube_feasible(cube)) return true;
    }
  }
  return false;
}

}  // namespace oracle_support
