#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "maxstrat/bdd.hpp"
#include "maxstrat/errors.hpp"

namespace maxstrat {

template <class V>
class MtbddStore;

/// Handle to a multi-terminal decision diagram with leaves of type V, over
/// the variables of a BddManager. Equal handles denote equal functions.
template <class V>
class Mtbdd {
 public:
  Mtbdd() = default;

  MtbddStore<V>* store() const { return store_; }
  NodeId id() const { return id_; }
  bool is_null() const { return store_ == nullptr; }
  bool is_terminal() const { return store_->is_terminal(id_); }
  const V& terminal_value() const { return store_->value_of(id_); }
  BddVar top_var() const { return store_->nodes_[id_].var; }
  Mtbdd low() const { return Mtbdd(store_, store_->nodes_[id_].low); }
  Mtbdd high() const { return Mtbdd(store_, store_->nodes_[id_].high); }

  const V& eval(const std::vector<bool>& assignment) const;
  /// ite(guard, value, *this)
  Mtbdd assign(const Bdd& guard, const V& value) const;
  /// (guard, value) for every reachable leaf, sorted by value.
  std::vector<std::pair<V, Bdd>> reverse_image() const;
  /// Assignments whose leaf satisfies `pred`.
  Bdd preimage(const std::function<bool(const V&)>& pred) const;
  /// Reachable leaves, sorted.
  std::vector<V> leaves() const;
  std::size_t node_count() const;
  std::string dump(const std::function<std::string(const V&)>& show) const;

  bool operator==(const Mtbdd& other) const = default;

 private:
  friend class MtbddStore<V>;
  Mtbdd(MtbddStore<V>* store, NodeId id) : store_(store), id_(id) {}

  MtbddStore<V>* store_ = nullptr;
  NodeId id_ = 0;
};

/// Node storage for Mtbdd<V>. Leaves are interned by value, so V must be
/// totally ordered by operator<.
template <class V>
class MtbddStore {
 public:
  explicit MtbddStore(BddManager& manager) : manager_(&manager) {}
  MtbddStore(const MtbddStore&) = delete;
  MtbddStore& operator=(const MtbddStore&) = delete;

  BddManager& manager() const { return *manager_; }

  Mtbdd<V> constant(const V& value) {
    auto it = leaf_ids_.find(value);
    if (it != leaf_ids_.end()) return Mtbdd<V>(this, it->second);
    auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({kTerminalVar, static_cast<NodeId>(values_.size()), 0});
    values_.push_back(value);
    leaf_ids_.emplace(value, id);
    return Mtbdd<V>(this, id);
  }

  Mtbdd<V> ite(const Bdd& guard, const Mtbdd<V>& then_f, const Mtbdd<V>& else_f) {
    manager_->check_owner(guard);
    check_owner(then_f);
    check_owner(else_f);
    return Mtbdd<V>(this, ite_rec(guard.id(), then_f.id(), else_f.id()));
  }

  /// Builds (var ? high : low); children must only test variables after var.
  Mtbdd<V> node(BddVar var, const Mtbdd<V>& low, const Mtbdd<V>& high) {
    check_owner(low);
    check_owner(high);
    if (var >= nodes_[low.id()].var || var >= nodes_[high.id()].var) {
      throw UsageError("mtbdd node children must lie below their parent");
    }
    return Mtbdd<V>(this, make(var, low.id(), high.id()));
  }

  void check_owner(const Mtbdd<V>& f) const {
    if (f.store() != this) throw ManagerMismatchError();
  }

  std::size_t allocated_nodes() const { return nodes_.size(); }

 private:
  friend class Mtbdd<V>;

  struct Node {
    BddVar var;
    NodeId low;  // leaf index for terminals
    NodeId high;
  };
  struct KeyHash {
    std::size_t operator()(const std::tuple<NodeId, NodeId, NodeId>& key) const {
      std::uint64_t h = std::get<0>(key);
      h = h * 0x9e3779b97f4a7c15ULL + std::get<1>(key);
      h = h * 0x9e3779b97f4a7c15ULL + std::get<2>(key);
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };
  using KeyMap =
      std::unordered_map<std::tuple<NodeId, NodeId, NodeId>, NodeId, KeyHash>;

  bool is_terminal(NodeId id) const { return nodes_[id].var == kTerminalVar; }
  const V& value_of(NodeId id) const {
    if (!is_terminal(id)) throw UsageError("mtbdd node is not a leaf");
    return values_[nodes_[id].low];
  }

  NodeId make(BddVar var, NodeId low, NodeId high) {
    if (low == high) return low;
    auto key = std::make_tuple(var, low, high);
    if (auto it = unique_.find(key); it != unique_.end()) return it->second;
    auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({var, low, high});
    unique_.emplace(key, id);
    return id;
  }

  NodeId ite_rec(NodeId guard, NodeId f, NodeId g) {
    if (guard == 1) return f;
    if (guard == 0) return g;
    if (f == g) return f;
    auto key = std::make_tuple(guard, f, g);
    if (auto it = ite_cache_.find(key); it != ite_cache_.end()) return it->second;
    BddVar top =
        std::min({manager_->node_var(guard), nodes_[f].var, nodes_[g].var});
    auto guard_cof = [&](bool value) {
      if (manager_->node_var(guard) != top) return guard;
      return value ? manager_->node_high(guard) : manager_->node_low(guard);
    };
    auto cof = [&](NodeId n, bool value) {
      if (nodes_[n].var != top) return n;
      return value ? nodes_[n].high : nodes_[n].low;
    };
    NodeId low = ite_rec(guard_cof(false), cof(f, false), cof(g, false));
    NodeId high = ite_rec(guard_cof(true), cof(f, true), cof(g, true));
    NodeId result = make(top, low, high);
    if (ite_cache_.size() >= (std::size_t{1} << 22)) ite_cache_.clear();
    ite_cache_.emplace(key, result);
    return result;
  }

  BddManager* manager_;
  std::vector<Node> nodes_;
  std::deque<V> values_;
  std::map<V, NodeId> leaf_ids_;
  KeyMap unique_;
  KeyMap ite_cache_;
};

template <class V>
const V& Mtbdd<V>::eval(const std::vector<bool>& assignment) const {
  NodeId n = id_;
  while (!store_->is_terminal(n)) {
    const auto& node = store_->nodes_[n];
    n = assignment.at(node.var) ? node.high : node.low;
  }
  return store_->value_of(n);
}

template <class V>
Mtbdd<V> Mtbdd<V>::assign(const Bdd& guard, const V& value) const {
  return store_->ite(guard, store_->constant(value), *this);
}

template <class V>
Bdd Mtbdd<V>::preimage(const std::function<bool(const V&)>& pred) const {
  BddManager& m = store_->manager();
  std::unordered_map<NodeId, Bdd> memo;
  std::function<Bdd(NodeId)> rec = [&](NodeId n) -> Bdd {
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    Bdd result;
    if (store_->is_terminal(n)) {
      result = m.constant(pred(store_->value_of(n)));
    } else {
      const auto& node = store_->nodes_[n];
      result = m.ite(m.var(node.var), rec(node.high), rec(node.low));
    }
    memo.emplace(n, result);
    return result;
  };
  return rec(id_);
}

template <class V>
std::vector<V> Mtbdd<V>::leaves() const {
  std::vector<NodeId> stack{id_};
  std::unordered_map<NodeId, bool> seen;
  std::vector<V> out;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (seen.count(n)) continue;
    seen.emplace(n, true);
    if (store_->is_terminal(n)) {
      out.push_back(store_->value_of(n));
    } else {
      stack.push_back(store_->nodes_[n].low);
      stack.push_back(store_->nodes_[n].high);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <class V>
std::vector<std::pair<V, Bdd>> Mtbdd<V>::reverse_image() const {
  std::vector<std::pair<V, Bdd>> out;
  for (const V& value : leaves()) {
    out.emplace_back(value, preimage([&](const V& v) { return v == value; }));
  }
  return out;
}

template <class V>
std::size_t Mtbdd<V>::node_count() const {
  std::vector<NodeId> stack{id_};
  std::unordered_map<NodeId, bool> seen;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (seen.count(n)) continue;
    seen.emplace(n, true);
    if (!store_->is_terminal(n)) {
      stack.push_back(store_->nodes_[n].low);
      stack.push_back(store_->nodes_[n].high);
    }
  }
  return seen.size();
}

template <class V>
std::string Mtbdd<V>::dump(const std::function<std::string(const V&)>& show) const {
  const BddManager& m = store_->manager();
  std::map<NodeId, std::size_t> label;
  std::ostringstream out;
  auto name = [&](NodeId n) { return "@" + std::to_string(label.at(n)); };
  std::function<void(NodeId)> rec = [&](NodeId n) {
    if (label.count(n)) return;
    if (store_->is_terminal(n)) {
      std::size_t k = label.size();
      label.emplace(n, k);
      out << "@" << k << ": [" << show(store_->value_of(n)) << "]\n";
      return;
    }
    const auto& node = store_->nodes_[n];
    rec(node.low);
    rec(node.high);
    std::size_t k = label.size();
    label.emplace(n, k);
    out << "@" << k << ": " << m.var_name(node.var) << " ? " << name(node.high)
        << " : " << name(node.low) << "\n";
  };
  rec(id_);
  out << "root " << name(id_) << "\n";
  return out.str();
}

/// Whether pred(f(x), g(x)) holds for every assignment x. Both diagrams must
/// share a BddManager.
template <class V, class W, class Pred>
bool forall_pairs(const Mtbdd<V>& f, const Mtbdd<W>& g, Pred pred) {
  if (&f.store()->manager() != &g.store()->manager()) {
    throw ManagerMismatchError();
  }
  std::map<std::pair<NodeId, NodeId>, bool> memo;
  std::function<bool(const Mtbdd<V>&, const Mtbdd<W>&)> rec =
      [&](const Mtbdd<V>& a, const Mtbdd<W>& b) -> bool {
    auto key = std::make_pair(a.id(), b.id());
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool result;
    if (a.is_terminal() && b.is_terminal()) {
      result = pred(a.terminal_value(), b.terminal_value());
    } else {
      BddVar top = std::min(a.is_terminal() ? kTerminalVar : a.top_var(),
                            b.is_terminal() ? kTerminalVar : b.top_var());
      auto cof_a = [&](bool v) {
        return (!a.is_terminal() && a.top_var() == top) ? (v ? a.high() : a.low()) : a;
      };
      auto cof_b = [&](bool v) {
        return (!b.is_terminal() && b.top_var() == top) ? (v ? b.high() : b.low()) : b;
      };
      result = rec(cof_a(false), cof_b(false)) && rec(cof_a(true), cof_b(true));
    }
    memo.emplace(key, result);
    return result;
  };
  return rec(f, g);
}

/// Pointwise image of f under fn, stored in `target`.
template <class V, class W, class Fn>
Mtbdd<W> map_leaves(const Mtbdd<V>& f, MtbddStore<W>& target, Fn fn) {
  std::unordered_map<NodeId, Mtbdd<W>> memo;
  std::function<Mtbdd<W>(const Mtbdd<V>&)> rec = [&](const Mtbdd<V>& a) -> Mtbdd<W> {
    if (auto it = memo.find(a.id()); it != memo.end()) return it->second;
    Mtbdd<W> result = a.is_terminal()
                          ? target.constant(fn(a.terminal_value()))
                          : target.node(a.top_var(), rec(a.low()), rec(a.high()));
    memo.emplace(a.id(), result);
    return result;
  };
  return rec(f);
}

}  // namespace maxstrat
