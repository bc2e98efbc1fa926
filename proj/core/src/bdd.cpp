#include "maxstrat/bdd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <tuple>

#include "maxstrat/errors.hpp"

namespace maxstrat {

namespace {

constexpr std::size_t kIteCacheLimit = std::size_t{1} << 22;

void require_same(const Bdd& a, const Bdd& b) {
  if (a.manager() == nullptr || a.manager() != b.manager()) {
    throw ManagerMismatchError();
  }
}

}  // namespace

std::size_t BddManager::TripleHash::operator()(
    const std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>& key) const {
  std::uint64_t h = std::get<0>(key);
  h = h * 0x9e3779b97f4a7c15ULL + std::get<1>(key);
  h = h * 0x9e3779b97f4a7c15ULL + std::get<2>(key);
  return static_cast<std::size_t>(h ^ (h >> 29));
}

BddManager::BddManager(std::vector<std::string> var_names, std::size_t node_cap)
    : names_(std::move(var_names)), node_cap_(node_cap) {
  nodes_.push_back({kTerminalVar, 0, 0});
  nodes_.push_back({kTerminalVar, 1, 1});
}

std::optional<BddVar> BddManager::find_var(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<BddVar>(it - names_.begin());
}

void BddManager::check_owner(const Bdd& bdd) const {
  if (bdd.manager() != this) throw ManagerMismatchError();
}

NodeId BddManager::make(BddVar var, NodeId low, NodeId high) {
  if (low == high) return low;
  auto key = std::make_tuple(var, low, high);
  if (auto it = unique_.find(key); it != unique_.end()) return it->second;
  if (nodes_.size() >= node_cap_) {
    throw ResourceError("bdd node cap exceeded");
  }
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({var, low, high});
  unique_.emplace(key, id);
  return id;
}

Bdd BddManager::var(BddVar v) {
  if (v >= names_.size()) throw UsageError("bdd variable out of range");
  return Bdd(this, make(v, 0, 1));
}

Bdd BddManager::nvar(BddVar v) {
  if (v >= names_.size()) throw UsageError("bdd variable out of range");
  return Bdd(this, make(v, 1, 0));
}

Bdd BddManager::cube(const Cube& literals) {
  Bdd result = one();
  for (const auto& [v, polarity] : literals) result &= literal(v, polarity);
  return result;
}

Bdd BddManager::minterm(const std::vector<BddVar>& vars,
                        const std::vector<bool>& values) {
  Bdd result = one();
  for (std::size_t k = 0; k < vars.size(); ++k) {
    result &= literal(vars[k], values.at(k));
  }
  return result;
}

Bdd BddManager::node(BddVar v, const Bdd& low, const Bdd& high) {
  check_owner(low);
  check_owner(high);
  if (v >= nodes_[low.id()].var || v >= nodes_[high.id()].var) {
    throw UsageError("bdd node children must lie below their parent");
  }
  return Bdd(this, make(v, low.id(), high.id()));
}

NodeId BddManager::cofactor(NodeId f, BddVar v, bool value) const {
  if (nodes_[f].var != v) return f;
  return value ? nodes_[f].high : nodes_[f].low;
}

NodeId BddManager::ite_rec(NodeId f, NodeId g, NodeId h) {
  if (f == 1) return g;
  if (f == 0) return h;
  if (g == h) return g;
  if (g == 1 && h == 0) return f;
  auto key = std::make_tuple(f, g, h);
  if (auto it = ite_cache_.find(key); it != ite_cache_.end()) return it->second;
  BddVar top = std::min({nodes_[f].var, nodes_[g].var, nodes_[h].var});
  NodeId low = ite_rec(cofactor(f, top, false), cofactor(g, top, false),
                       cofactor(h, top, false));
  NodeId high = ite_rec(cofactor(f, top, true), cofactor(g, top, true),
                        cofactor(h, top, true));
  NodeId result = make(top, low, high);
  if (ite_cache_.size() >= kIteCacheLimit) ite_cache_.clear();
  ite_cache_.emplace(key, result);
  return result;
}

Bdd BddManager::ite(const Bdd& cond, const Bdd& then_bdd, const Bdd& else_bdd) {
  check_owner(cond);
  check_owner(then_bdd);
  check_owner(else_bdd);
  return Bdd(this, ite_rec(cond.id(), then_bdd.id(), else_bdd.id()));
}

BddVar Bdd::top_var() const { return manager_->nodes_[id_].var; }

Bdd Bdd::low() const { return Bdd(manager_, manager_->nodes_[id_].low); }

Bdd Bdd::high() const { return Bdd(manager_, manager_->nodes_[id_].high); }

Bdd Bdd::operator&(const Bdd& other) const {
  require_same(*this, other);
  return Bdd(manager_, manager_->ite_rec(id_, other.id_, 0));
}

Bdd Bdd::operator|(const Bdd& other) const {
  require_same(*this, other);
  return Bdd(manager_, manager_->ite_rec(id_, 1, other.id_));
}

Bdd Bdd::operator^(const Bdd& other) const {
  require_same(*this, other);
  NodeId negated = manager_->ite_rec(other.id_, 0, 1);
  return Bdd(manager_, manager_->ite_rec(id_, negated, other.id_));
}

Bdd Bdd::operator!() const {
  if (manager_ == nullptr) throw UsageError("negation of a null bdd");
  return Bdd(manager_, manager_->ite_rec(id_, 0, 1));
}

Bdd Bdd::restrict(BddVar var, bool value) const {
  std::unordered_map<NodeId, NodeId> memo;
  BddManager& m = *manager_;
  std::function<NodeId(NodeId)> rec = [&](NodeId f) -> NodeId {
    if (m.nodes_[f].var > var) return f;
    if (auto it = memo.find(f); it != memo.end()) return it->second;
    NodeId result;
    if (m.nodes_[f].var == var) {
      result = value ? m.nodes_[f].high : m.nodes_[f].low;
    } else {
      result = m.make(m.nodes_[f].var, rec(m.nodes_[f].low), rec(m.nodes_[f].high));
    }
    memo.emplace(f, result);
    return result;
  };
  return Bdd(manager_, rec(id_));
}

Bdd Bdd::exists(BddVar var) const {
  return restrict(var, false) | restrict(var, true);
}

Bdd Bdd::rename(const std::vector<BddVar>& mapping) const {
  std::unordered_map<NodeId, NodeId> memo;
  BddManager& m = *manager_;
  std::function<NodeId(NodeId)> rec = [&](NodeId f) -> NodeId {
    if (f <= 1) return f;
    if (auto it = memo.find(f); it != memo.end()) return it->second;
    BddVar target = mapping.at(m.nodes_[f].var);
    NodeId low = rec(m.nodes_[f].low);
    NodeId high = rec(m.nodes_[f].high);
    NodeId v = m.make(target, 0, 1);
    NodeId result = m.ite_rec(v, high, low);
    memo.emplace(f, result);
    return result;
  };
  return Bdd(manager_, rec(id_));
}

bool Bdd::eval(const std::vector<bool>& assignment) const {
  const BddManager& m = *manager_;
  NodeId f = id_;
  while (f > 1) {
    const auto& n = m.nodes_[f];
    f = assignment.at(n.var) ? n.high : n.low;
  }
  return f == 1;
}

std::optional<std::vector<bool>> Bdd::one_sat() const {
  if (is_false()) return std::nullopt;
  const BddManager& m = *manager_;
  std::vector<bool> out(m.num_vars(), false);
  NodeId f = id_;
  while (f > 1) {
    const auto& n = m.nodes_[f];
    if (n.low != 0) {
      f = n.low;
    } else {
      out[n.var] = true;
      f = n.high;
    }
  }
  return out;
}

double Bdd::sat_count() const {
  const BddManager& m = *manager_;
  const double nvars = static_cast<double>(m.num_vars());
  std::unordered_map<NodeId, double> memo;
  // fraction of assignments satisfying the node
  std::function<double(NodeId)> rec = [&](NodeId f) -> double {
    if (f <= 1) return static_cast<double>(f);
    if (auto it = memo.find(f); it != memo.end()) return it->second;
    double r = 0.5 * rec(m.nodes_[f].low) + 0.5 * rec(m.nodes_[f].high);
    memo.emplace(f, r);
    return r;
  };
  return rec(id_) * std::pow(2.0, nvars);
}

std::vector<Cube> Bdd::paths() const {
  std::vector<Cube> out;
  const BddManager& m = *manager_;
  Cube current;
  std::function<void(NodeId)> rec = [&](NodeId f) {
    if (f == 0) return;
    if (f == 1) {
      out.push_back(current);
      return;
    }
    const auto& n = m.nodes_[f];
    current.emplace_back(n.var, false);
    rec(n.low);
    current.back().second = true;
    rec(n.high);
    current.pop_back();
  };
  rec(id_);
  return out;
}

std::vector<Cube> Bdd::prime_cover() const {
  BddManager& m = *manager_;
  std::vector<Cube> cover;
  std::vector<Bdd> cube_bdds;
  Bdd remaining = *this;
  while (!remaining.is_false()) {
    Cube cube = remaining.paths().front();
    // expand to a prime implicant of *this by dropping literals greedily
    for (std::size_t k = 0; k < cube.size();) {
      Cube candidate = cube;
      candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(k));
      if (m.cube(candidate).implies(*this)) {
        cube = std::move(candidate);
      } else {
        ++k;
      }
    }
    Bdd cube_bdd = m.cube(cube);
    cover.push_back(cube);
    cube_bdds.push_back(cube_bdd);
    remaining = remaining.minus(cube_bdd);
  }
  // drop cubes covered by the others
  for (std::size_t k = cover.size(); k-- > 0;) {
    Bdd others = m.zero();
    for (std::size_t j = 0; j < cover.size(); ++j) {
      if (j != k) others |= cube_bdds[j];
    }
    if (cover.size() > 1 && cube_bdds[k].implies(others)) {
      cover.erase(cover.begin() + static_cast<std::ptrdiff_t>(k));
      cube_bdds.erase(cube_bdds.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }
  return cover;
}

std::vector<BddVar> Bdd::support() const {
  const BddManager& m = *manager_;
  std::vector<bool> seen_var(m.num_vars(), false);
  std::unordered_map<NodeId, bool> seen;
  std::vector<NodeId> stack{id_};
  while (!stack.empty()) {
    NodeId f = stack.back();
    stack.pop_back();
    if (f <= 1 || seen.count(f)) continue;
    seen.emplace(f, true);
    seen_var[m.nodes_[f].var] = true;
    stack.push_back(m.nodes_[f].low);
    stack.push_back(m.nodes_[f].high);
  }
  std::vector<BddVar> out;
  for (BddVar v = 0; v < seen_var.size(); ++v) {
    if (seen_var[v]) out.push_back(v);
  }
  return out;
}

std::size_t Bdd::node_count() const {
  const BddManager& m = *manager_;
  std::unordered_map<NodeId, bool> seen;
  std::vector<NodeId> stack{id_};
  while (!stack.empty()) {
    NodeId f = stack.back();
    stack.pop_back();
    if (seen.count(f)) continue;
    seen.emplace(f, true);
    if (f > 1) {
      stack.push_back(m.nodes_[f].low);
      stack.push_back(m.nodes_[f].high);
    }
  }
  return seen.size();
}

std::string Bdd::dump() const {
  const BddManager& m = *manager_;
  std::map<NodeId, std::size_t> label;
  std::ostringstream out;
  auto name = [&](NodeId f) -> std::string {
    if (f <= 1) return f == 1 ? "1" : "0";
    return "@" + std::to_string(label.at(f));
  };
  std::function<void(NodeId)> rec = [&](NodeId f) {
    if (f <= 1 || label.count(f)) return;
    rec(m.nodes_[f].low);
    rec(m.nodes_[f].high);
    std::size_t k = label.size();
    label.emplace(f, k);
    out << "@" << k << ": " << m.var_name(m.nodes_[f].var) << " ? "
        << name(m.nodes_[f].high) << " : " << name(m.nodes_[f].low) << "\n";
  };
  rec(id_);
  out << "root " << name(id_) << "\n";
  return out.str();
}

}  // namespace maxstrat
