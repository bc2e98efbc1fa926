#include "maxstrat/families.hpp"

#include "maxstrat/errors.hpp"

namespace maxstrat {

namespace {

constexpr int kBound = 10;

Formula le(const LinExpr& a, const LinExpr& b) { return Formula::compare(a, Cmp::Le, b); }
Formula eq(const LinExpr& a, const LinExpr& b) { return Formula::compare(a, Cmp::Eq, b); }
LinExpr num(int v) { return LinExpr::num(Rational(v)); }

}  // namespace

TransitionSystem array_traversal(std::size_t dims, std::size_t size) {
  if (dims == 0 || dims > 3) throw UsageError("array traversal supports 1 to 3 dimensions");
  if (size == 0) throw UsageError("family size must be at least 1");
  TransitionSystem ts;
  ts.name = "array" + std::to_string(dims) + "d_" + std::to_string(size);
  VarId control = ts.add_bool(dims == 1 ? "fwd" : "done");
  VarId control1 = ts.primed_bools()[0];
  for (std::size_t k = 1; k < size; ++k) ts.add_bool("m" + std::to_string(k));
  std::vector<VarId> idx;
  std::vector<VarId> idx1;
  for (std::size_t k = 0; k < dims; ++k) {
    idx.push_back(ts.add_num("i" + std::to_string(k)));
    idx1.push_back(ts.primed_nums()[k]);
  }

  std::vector<Formula> init{Formula::lit(control, dims == 1)};
  for (std::size_t k = 1; k < size; ++k) init.push_back(Formula::lit(ts.bools()[k], false));
  ts.set_init(Formula::conj(init), std::vector<Rational>(dims, Rational(0)));

  auto keep = [&](std::size_t k) { return eq(LinExpr::var(idx1[k]), LinExpr::var(idx[k])); };
  auto var = [](VarId v) { return LinExpr::var(v); };
  std::vector<Formula> steps;
  if (dims == 1) {
    steps.push_back(Formula::conj({Formula::lit(control), Formula::lit(control1),
                                   le(var(idx[0]), num(kBound - 1)),
                                   eq(var(idx1[0]), var(idx[0]) + num(1))}));
    steps.push_back(Formula::conj({Formula::lit(control), Formula::lit(control1, false),
                                   le(num(kBound), var(idx[0])), keep(0)}));
    steps.push_back(Formula::conj({Formula::lit(control, false), Formula::lit(control1, false),
                                   le(num(1), var(idx[0])),
                                   eq(var(idx1[0]), var(idx[0]) - num(1))}));
  } else {
    std::size_t inner = dims - 1;
    std::vector<Formula> step{Formula::lit(control, false), Formula::lit(control1, false),
                              le(var(idx[inner]), num(kBound - 1)),
                              eq(var(idx1[inner]), var(idx[inner]) + num(1))};
    for (std::size_t k = 0; k < inner; ++k) step.push_back(keep(k));
    steps.push_back(Formula::conj(step));
    for (std::size_t level = inner; level > 0; --level) {
      std::vector<Formula> carry{Formula::lit(control, false), Formula::lit(control1, false),
                                 le(num(kBound), var(idx[level])),
                                 le(var(idx[level - 1]), num(kBound - 1)),
                                 eq(var(idx1[level]), num(0)),
                                 eq(var(idx1[level - 1]), var(idx[level - 1]) + num(1))};
      for (std::size_t k = 0; k < dims; ++k) {
        if (k != level && k != level - 1) carry.push_back(keep(k));
      }
      steps.push_back(Formula::conj(carry));
    }
    std::vector<Formula> finish{Formula::lit(control, false), Formula::lit(control1),
                                le(num(kBound), var(idx[0]))};
    for (std::size_t k = 0; k < dims; ++k) finish.push_back(keep(k));
    steps.push_back(Formula::conj(finish));
  }
  ts.set_transition(Formula::disj(steps));
  return ts;
}

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names{"array1d", "array2d", "array3d"};
  return names;
}

TransitionSystem make_family(std::string_view name, std::size_t size) {
  for (std::size_t k = 0; k < family_names().size(); ++k) {
    if (name == family_names()[k]) return array_traversal(k + 1, size);
  }
  throw UsageError("unknown family '" + std::string(name) + "' (expected array1d, array2d or array3d)");
}

}  // namespace maxstrat
