#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "maxstrat/formula.hpp"
#include "maxstrat/sat.hpp"

namespace maxstrat {

enum class SmtResult { Sat, Unsat };

struct SmtStats {
  std::uint64_t checks = 0;
  std::uint64_t theory_checks = 0;
  std::uint64_t theory_lemmas = 0;
};

/// Incremental satisfiability of formulas over Booleans and linear rational
/// atoms. Sat answers ship a model that evaluates every live assertion true.
class SmtSolver {
 public:
  virtual ~SmtSolver() = default;

  virtual void push() = 0;
  /// Throws UsageError on an empty stack.
  virtual void pop() = 0;
  virtual void assert_formula(const Formula& f) = 0;
  /// Throws ResourceError when the search budget runs out.
  virtual SmtResult check() = 0;
  /// Model of the last Sat check; assigns every variable of live assertions.
  virtual const Model& model() const = 0;
  virtual const SmtStats& stats() const = 0;
};

/// Lazy DPLL(T): CDCL over a one-sided Tseitin encoding, with the true linear
/// atoms of each propositional model checked by the exact simplex.
class InternalSmt : public SmtSolver {
 public:
  explicit InternalSmt(const Vocabulary& vocab, std::uint64_t theory_round_cap = 10'000'000);

  void push() override;
  void pop() override;
  void assert_formula(const Formula& f) override;
  SmtResult check() override;
  const Model& model() const override { return model_; }
  const SmtStats& stats() const override { return stats_; }

 private:
  using Lit = SatSolver::Lit;

  Lit encode(const Formula& f);
  Lit bool_lit(VarId var);
  Lit true_lit();

  struct Frame {
    Lit activation;
    std::vector<Formula> assertions;
  };

  const Vocabulary* vocab_;
  std::uint64_t theory_round_cap_;
  SatSolver sat_;
  std::map<VarId, int> bool_vars_;
  std::map<Atom, int> atom_vars_;
  std::vector<std::pair<int, Atom>> atoms_;
  std::map<const void*, Lit> encoded_;
  std::vector<Formula> keep_alive_;
  std::vector<VarId> num_vars_;
  std::map<VarId, bool> num_seen_;
  std::optional<Lit> true_lit_;
  std::vector<Formula> base_;
  std::vector<Frame> frames_;
  Model model_;
  SmtStats stats_;
};

/// Speaks the SMT-LIB2 text protocol (logic QF_LRA) to a solver process
/// over pipes. The child is started with the given command line.
class ExternalSmt : public SmtSolver {
 public:
  ExternalSmt(const Vocabulary& vocab, const std::vector<std::string>& command);
  ~ExternalSmt() override;
  ExternalSmt(const ExternalSmt&) = delete;
  ExternalSmt& operator=(const ExternalSmt&) = delete;

  void push() override;
  void pop() override;
  void assert_formula(const Formula& f) override;
  SmtResult check() override;
  const Model& model() const override { return model_; }
  const SmtStats& stats() const override { return stats_; }

 private:
  void send(const std::string& text);
  std::string read_response();
  void declare(VarId var);

  const Vocabulary* vocab_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::vector<bool> declared_;
  std::vector<Formula> base_;
  std::vector<std::vector<Formula>> frames_;
  Model model_;
  SmtStats stats_;
};

/// SMT-LIB2 rendering of a formula; rationals as `(/ n d)`.
std::string to_smtlib(const Formula& f, const Vocabulary& vocab);
std::string smtlib_symbol(const std::string& name);
std::string smtlib_rational(const Rational& value);
/// Parses `n`, `n.0`, `(- x)` and `(/ x y)` numerals.
Rational parse_smtlib_rational(const std::string& text);

/// Solver selection: "internal" or "external:<path>".
struct SmtBackend {
  bool external = false;
  std::vector<std::string> command;

  static SmtBackend parse(const std::string& spec);
  std::string str() const;
};

std::unique_ptr<SmtSolver> make_smt(const SmtBackend& backend, const Vocabulary& vocab);

/// Streams models of a propositional formula; the caller blocks what it has
/// seen with block() (otherwise next() may return the same model again).
class ModelEnumerator {
 public:
  ModelEnumerator(const Formula& f, const Vocabulary& vocab);

  /// Assignment to every Boolean variable of the formula, or nullopt.
  std::optional<std::map<VarId, bool>> next();
  /// Conjoins ¬g.
  void block(const Formula& g);
  std::uint64_t models_returned() const { return returned_; }

 private:
  InternalSmt smt_;
  std::vector<VarId> vars_;
  std::uint64_t returned_ = 0;
};

/// Satisfiable models of `f`, blocking each full model in turn.
std::vector<std::map<VarId, bool>> sat_all_models(const Formula& f, const Vocabulary& vocab);

}  // namespace maxstrat
