#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace maxstrat {

using BddVar = std::uint32_t;
using NodeId = std::uint32_t;

inline constexpr BddVar kTerminalVar = std::numeric_limits<BddVar>::max();

/// Conjunction of literals; `second` is the polarity.
using Cube = std::vector<std::pair<BddVar, bool>>;

class BddManager;

/// Handle to a reduced ordered BDD node owned by a BddManager. Two handles
/// from the same manager are equal iff they denote the same function.
class Bdd {
 public:
  Bdd() = default;

  BddManager* manager() const { return manager_; }
  NodeId id() const { return id_; }
  bool is_null() const { return manager_ == nullptr; }
  bool is_true() const { return manager_ != nullptr && id_ == 1; }
  bool is_false() const { return manager_ != nullptr && id_ == 0; }
  bool is_terminal() const { return id_ <= 1; }

  BddVar top_var() const;
  Bdd low() const;
  Bdd high() const;

  Bdd operator&(const Bdd& other) const;
  Bdd operator|(const Bdd& other) const;
  Bdd operator^(const Bdd& other) const;
  Bdd operator!() const;
  Bdd& operator&=(const Bdd& other) { return *this = *this & other; }
  Bdd& operator|=(const Bdd& other) { return *this = *this | other; }
  /// this ∧ ¬other
  Bdd minus(const Bdd& other) const { return *this & !other; }
  /// Whether this implies other.
  bool implies(const Bdd& other) const { return minus(other).is_false(); }

  /// Cofactor with `var` fixed to `value`.
  Bdd restrict(BddVar var, bool value) const;
  Bdd exists(BddVar var) const;
  /// Substitutes variable v by mapping[v] (any mapping; the result is
  /// re-ordered as needed).
  Bdd rename(const std::vector<BddVar>& mapping) const;

  /// Evaluates under a full assignment indexed by manager variable.
  bool eval(const std::vector<bool>& assignment) const;
  /// A satisfying full assignment (don't-cares set to false), if any.
  std::optional<std::vector<bool>> one_sat() const;
  /// Number of satisfying assignments over all manager variables.
  double sat_count() const;

  /// Disjoint cubes, one per path to the true terminal.
  std::vector<Cube> paths() const;
  /// Irredundant cover by prime implicants, deterministic.
  std::vector<Cube> prime_cover() const;

  std::vector<BddVar> support() const;
  std::size_t node_count() const;
  /// Deterministic textual node listing.
  std::string dump() const;

  bool operator==(const Bdd& other) const = default;

 private:
  friend class BddManager;
  Bdd(BddManager* manager, NodeId id) : manager_(manager), id_(id) {}

  BddManager* manager_ = nullptr;
  NodeId id_ = 0;
};

/// Owns BDD nodes over a fixed variable order (variable index = level).
/// Confined to one thread; handles must not outlive the manager.
class BddManager {
 public:
  explicit BddManager(std::vector<std::string> var_names,
                      std::size_t node_cap = std::size_t{1} << 24);
  BddManager(const BddManager&) = delete;
  BddManager& operator=(const BddManager&) = delete;

  std::size_t num_vars() const { return names_.size(); }
  const std::string& var_name(BddVar var) const { return names_.at(var); }
  std::optional<BddVar> find_var(const std::string& name) const;

  Bdd one() { return Bdd(this, 1); }
  Bdd zero() { return Bdd(this, 0); }
  Bdd constant(bool value) { return value ? one() : zero(); }
  Bdd var(BddVar var);
  Bdd nvar(BddVar var);
  Bdd literal(BddVar var, bool polarity) { return polarity ? this->var(var) : nvar(var); }
  Bdd cube(const Cube& literals);
  /// Characteristic function of one full assignment restricted to `vars`.
  Bdd minterm(const std::vector<BddVar>& vars, const std::vector<bool>& values);

  Bdd ite(const Bdd& cond, const Bdd& then_bdd, const Bdd& else_bdd);
  /// Builds (var ? high : low); children must only test variables after var.
  Bdd node(BddVar var, const Bdd& low, const Bdd& high);

  std::size_t allocated_nodes() const { return nodes_.size(); }

  BddVar node_var(NodeId id) const { return nodes_[id].var; }
  NodeId node_low(NodeId id) const { return nodes_[id].low; }
  NodeId node_high(NodeId id) const { return nodes_[id].high; }

  /// Checks that a handle belongs to this manager; throws ManagerMismatchError.
  void check_owner(const Bdd& bdd) const;

 private:
  friend class Bdd;

  struct Node {
    BddVar var;
    NodeId low;
    NodeId high;
  };

  struct TripleHash {
    std::size_t operator()(const std::tuple<std::uint32_t, std::uint32_t,
                                            std::uint32_t>& key) const;
  };
  using TripleMap =
      std::unordered_map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>,
                         NodeId, TripleHash>;

  NodeId make(BddVar var, NodeId low, NodeId high);
  NodeId ite_rec(NodeId f, NodeId g, NodeId h);
  NodeId cofactor(NodeId f, BddVar var, bool value) const;

  std::vector<std::string> names_;
  std::size_t node_cap_;
  std::vector<Node> nodes_;
  TripleMap unique_;
  TripleMap ite_cache_;
};

}  // namespace maxstrat
