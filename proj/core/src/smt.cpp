#include "maxstrat/smt.hpp"

#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstring>
#include <sstream>

#include "maxstrat/errors.hpp"
#include "maxstrat/lp.hpp"

namespace maxstrat {

// ---------------------------------------------------------------- internal

InternalSmt::InternalSmt(const Vocabulary& vocab, std::uint64_t theory_round_cap)
    : vocab_(&vocab), theory_round_cap_(theory_round_cap) {}

InternalSmt::Lit InternalSmt::true_lit() {
  if (!true_lit_) {
    int v = sat_.new_var();
    true_lit_ = SatSolver::make_lit(v, true);
    sat_.add_clause({*true_lit_});
  }
  return *true_lit_;
}

InternalSmt::Lit InternalSmt::bool_lit(VarId var) {
  if (!is_boolean(vocab_->sort(var))) {
    throw UsageError("numeric variable '" + vocab_->name(var) + "' used as a literal");
  }
  auto it = bool_vars_.find(var);
  if (it == bool_vars_.end()) it = bool_vars_.emplace(var, sat_.new_var()).first;
  return SatSolver::make_lit(it->second, true);
}

InternalSmt::Lit InternalSmt::encode(const Formula& f) {
  if (auto it = encoded_.find(f.identity()); it != encoded_.end()) return it->second;
  Lit out = 0;
  switch (f.kind()) {
    case Formula::Kind::True:
      out = true_lit();
      break;
    case Formula::Kind::False:
      out = SatSolver::negate(true_lit());
      break;
    case Formula::Kind::Lit: {
      Lit l = bool_lit(f.var());
      out = f.polarity() ? l : SatSolver::negate(l);
      break;
    }
    case Formula::Kind::Atom: {
      const Atom& a = f.atom_value();
      auto it = atom_vars_.find(a);
      if (it == atom_vars_.end()) {
        for (const auto& [v, c] : a.terms) {
          if (is_boolean(vocab_->sort(v))) {
            throw UsageError("Boolean variable '" + vocab_->name(v) + "' used in a linear atom");
          }
          if (num_seen_.emplace(v, true).second) num_vars_.push_back(v);
        }
        int sv = sat_.new_var();
        it = atom_vars_.emplace(a, sv).first;
        atoms_.emplace_back(sv, a);
      }
      out = SatSolver::make_lit(it->second, true);
      break;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Lit> kids;
      for (const auto& c : f.children()) kids.push_back(encode(c));
      Lit self = SatSolver::make_lit(sat_.new_var(), true);
      if (f.kind() == Formula::Kind::And) {
        for (Lit k : kids) sat_.add_clause({SatSolver::negate(self), k});
      } else {
        kids.push_back(SatSolver::negate(self));
        sat_.add_clause(kids);
      }
      out = self;
      break;
    }
  }
  keep_alive_.push_back(f);
  encoded_.emplace(f.identity(), out);
  return out;
}

void InternalSmt::push() {
  frames_.push_back({SatSolver::make_lit(sat_.new_var(), true), {}});
}

void InternalSmt::pop() {
  if (frames_.empty()) throw UsageError("pop on an empty assertion stack");
  sat_.add_clause({SatSolver::negate(frames_.back().activation)});
  frames_.pop_back();
}

void InternalSmt::assert_formula(const Formula& f) {
  Lit l = encode(f);
  if (frames_.empty()) {
    sat_.add_clause({l});
    base_.push_back(f);
  } else {
    sat_.add_clause({SatSolver::negate(frames_.back().activation), l});
    frames_.back().assertions.push_back(f);
  }
}

SmtResult InternalSmt::check() {
  ++stats_.checks;
  std::vector<Lit> assumptions;
  for (const auto& frame : frames_) assumptions.push_back(frame.activation);
  for (std::uint64_t round = 0;; ++round) {
    if (round >= theory_round_cap_) throw ResourceError("smt theory round cap exhausted");
    if (sat_.solve(assumptions) == SatSolver::Result::Unsat) return SmtResult::Unsat;

    LpProblem lp;
    std::map<VarId, std::size_t> column;
    std::vector<int> row_atom;
    for (const auto& [sv, atom] : atoms_) {
      if (!sat_.model_value(sv)) continue;
      LinearForm form;
      for (const auto& [v, c] : atom.terms) {
        auto [it, fresh] = column.emplace(v, lp.num_variables());
        if (fresh) lp.add_variable(vocab_->name(v));
        form.emplace(it->second, c);
      }
      switch (atom.cmp) {
        case Cmp::Le:
          lp.add_le(std::move(form), atom.rhs);
          break;
        case Cmp::Lt:
          lp.add_lt(std::move(form), atom.rhs);
          break;
        case Cmp::Eq:
          lp.add_eq(std::move(form), atom.rhs);
          break;
      }
      row_atom.push_back(sv);
    }
    ++stats_.theory_checks;
    StrictFeasibility result = lp_feasible_strict(lp);
    if (!result.sat) {
      std::vector<Lit> lemma;
      for (std::size_t r : result.conflict) {
        lemma.push_back(SatSolver::make_lit(row_atom[r], false));
      }
      sat_.add_clause(std::move(lemma));
      ++stats_.theory_lemmas;
      continue;
    }
    model_ = Model();
    for (const auto& [var, sv] : bool_vars_) model_.set_bool(var, sat_.model_value(sv));
    for (VarId v : num_vars_) {
      auto it = column.find(v);
      model_.set_num(v, it == column.end() ? Rational(0) : result.witness[it->second]);
    }
    auto verify = [&](const Formula& f) {
      if (!evaluate(f, model_)) throw Error("smt model fails an assertion");
    };
    for (const auto& f : base_) verify(f);
    for (const auto& frame : frames_) {
      for (const auto& f : frame.assertions) verify(f);
    }
    return SmtResult::Sat;
  }
}

// ---------------------------------------------------------------- smtlib

std::string smtlib_symbol(const std::string& name) { return "|" + name + "|"; }

std::string smtlib_rational(const Rational& value) {
  Rational mag = value.abs();
  std::string body = mag.is_integer()
                         ? mag.numerator_str()
                         : "(/ " + mag.numerator_str() + " " + mag.denominator_str() + ")";
  return value.sign() < 0 ? "(- " + body + ")" : body;
}

std::string to_smtlib(const Formula& f, const Vocabulary& vocab) {
  switch (f.kind()) {
    case Formula::Kind::True:
      return "true";
    case Formula::Kind::False:
      return "false";
    case Formula::Kind::Lit:
      return f.polarity() ? smtlib_symbol(vocab.name(f.var()))
                          : "(not " + smtlib_symbol(vocab.name(f.var())) + ")";
    case Formula::Kind::Atom: {
      const Atom& a = f.atom_value();
      std::string lhs;
      auto term = [&](VarId v, const Rational& c) {
        if (c == Rational(1)) return smtlib_symbol(vocab.name(v));
        return "(* " + smtlib_rational(c) + " " + smtlib_symbol(vocab.name(v)) + ")";
      };
      if (a.terms.size() == 1) {
        lhs = term(a.terms.begin()->first, a.terms.begin()->second);
      } else {
        lhs = "(+";
        for (const auto& [v, c] : a.terms) lhs += " " + term(v, c);
        lhs += ")";
      }
      const char* op = a.cmp == Cmp::Le ? "<=" : a.cmp == Cmp::Lt ? "<" : "=";
      return std::string("(") + op + " " + lhs + " " + smtlib_rational(a.rhs) + ")";
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::string out = f.kind() == Formula::Kind::And ? "(and" : "(or";
      for (const auto& c : f.children()) out += " " + to_smtlib(c, vocab);
      return out + ")";
    }
  }
  return "";
}

namespace {

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
};

SExpr parse_sexpr(const std::string& text, std::size_t& pos) {
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos >= text.size()) throw Error("truncated solver response");
  SExpr out;
  if (text[pos] == '(') {
    out.is_list = true;
    ++pos;
    while (true) {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos >= text.size()) throw Error("truncated solver response");
      if (text[pos] == ')') {
        ++pos;
        return out;
      }
      out.items.push_back(parse_sexpr(text, pos));
    }
  }
  if (text[pos] == '|') {
    std::size_t end = text.find('|', pos + 1);
    if (end == std::string::npos) throw Error("unterminated solver symbol");
    out.atom = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    return out;
  }
  std::size_t start = pos;
  while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
         text[pos] != '(' && text[pos] != ')') {
    ++pos;
  }
  out.atom = text.substr(start, pos - start);
  return out;
}

Rational decimal_value(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational::parse(text);
  std::string whole = text.substr(0, dot);
  std::string frac = text.substr(dot + 1);
  Rational scale(1);
  for (std::size_t k = 0; k < frac.size(); ++k) scale *= Rational(10);
  Rational value = Rational::parse(whole.empty() ? "0" : whole);
  if (!frac.empty()) value += Rational::parse(frac) / scale;
  return value;
}

Rational sexpr_rational(const SExpr& e) {
  if (!e.is_list) return decimal_value(e.atom);
  if (e.items.size() == 2 && !e.items[0].is_list && e.items[0].atom == "-") {
    return -sexpr_rational(e.items[1]);
  }
  if (e.items.size() == 3 && !e.items[0].is_list && e.items[0].atom == "/") {
    return sexpr_rational(e.items[1]) / sexpr_rational(e.items[2]);
  }
  throw Error("unsupported numeral in solver response");
}

}  // namespace

Rational parse_smtlib_rational(const std::string& text) {
  std::size_t pos = 0;
  return sexpr_rational(parse_sexpr(text, pos));
}

// ---------------------------------------------------------------- external

ExternalSmt::ExternalSmt(const Vocabulary& vocab, const std::vector<std::string>& command)
    : vocab_(&vocab) {
  if (command.empty()) throw UsageError("empty external solver command");
  int fds[2];
  if (socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
    throw Error(std::string("socketpair failed: ") + std::strerror(errno));
  }
  std::vector<std::string> args = command;
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw Error(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    close(fds[0]);
    dup2(fds[1], STDIN_FILENO);
    dup2(fds[1], STDOUT_FILENO);
    close(fds[1]);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(fds[1]);
  pid_ = pid;
  to_child_ = fds[0];
  from_child_ = fds[0];
  send("(set-option :print-success false)\n(set-option :produce-models true)\n"
       "(set-option :global-declarations true)\n(set-logic QF_LRA)\n");
}

ExternalSmt::~ExternalSmt() {
  if (to_child_ >= 0) {
    const char bye[] = "(exit)\n";
    (void)::send(to_child_, bye, sizeof(bye) - 1, MSG_NOSIGNAL);
    close(to_child_);
  }
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

void ExternalSmt::send(const std::string& text) {
  std::size_t done = 0;
  while (done < text.size()) {
    ssize_t n = ::send(to_child_, text.data() + done, text.size() - done, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("external solver is not accepting input");
    }
    done += static_cast<std::size_t>(n);
  }
}

std::string ExternalSmt::read_response() {
  // one complete token or balanced s-expression
  while (true) {
    std::size_t pos = 0;
    while (pos < buffer_.size() && std::isspace(static_cast<unsigned char>(buffer_[pos]))) ++pos;
    if (pos < buffer_.size()) {
      int depth = 0;
      bool in_bar = false;
      bool in_string = false;
      for (std::size_t k = pos; k < buffer_.size(); ++k) {
        char c = buffer_[k];
        if (in_bar) {
          in_bar = c != '|';
          continue;
        }
        if (in_string) {
          in_string = c != '"';
          continue;
        }
        if (c == '|') in_bar = true;
        if (c == '"') in_string = true;
        if (c == '(') ++depth;
        if (c == ')') --depth;
        bool boundary = depth == 0 && (c == ')' || (buffer_[pos] != '(' &&
                                                    (k + 1 < buffer_.size() &&
                                                     std::isspace(static_cast<unsigned char>(buffer_[k + 1])))));
        if (boundary) {
          std::string out = buffer_.substr(pos, k + 1 - pos);
          buffer_.erase(0, k + 1);
          return out;
        }
      }
    }
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error("external solver terminated unexpectedly");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void ExternalSmt::declare(VarId var) {
  if (declared_.size() <= var) declared_.resize(var + 1, false);
  if (declared_[var]) return;
  declared_[var] = true;
  send("(declare-fun " + smtlib_symbol(vocab_->name(var)) + " () " +
       (is_boolean(vocab_->sort(var)) ? "Bool" : "Real") + ")\n");
}

void ExternalSmt::push() {
  frames_.emplace_back();
  send("(push 1)\n");
}

void ExternalSmt::pop() {
  if (frames_.empty()) throw UsageError("pop on an empty assertion stack");
  frames_.pop_back();
  send("(pop 1)\n");
}

void ExternalSmt::assert_formula(const Formula& f) {
  for (VarId v : variables(f)) declare(v);
  (frames_.empty() ? base_ : frames_.back()).push_back(f);
  send("(assert " + to_smtlib(f, *vocab_) + ")\n");
}

SmtResult ExternalSmt::check() {
  ++stats_.checks;
  send("(check-sat)\n");
  std::string answer = read_response();
  if (answer == "unsat") return SmtResult::Unsat;
  if (answer == "unknown") throw ResourceError("external solver answered unknown");
  if (answer != "sat") throw Error("external solver error: " + answer);
  model_ = Model();
  std::vector<VarId> vars;
  for (VarId v = 0; v < declared_.size(); ++v) {
    if (declared_[v]) vars.push_back(v);
  }
  if (!vars.empty()) {
    std::string request = "(get-value (";
    for (VarId v : vars) request += " " + smtlib_symbol(vocab_->name(v));
    send(request + "))\n");
    std::string response = read_response();
    std::size_t pos = 0;
    SExpr parsed = parse_sexpr(response, pos);
    if (!parsed.is_list || parsed.items.size() != vars.size()) {
      throw Error("malformed get-value response: " + response);
    }
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const SExpr& pair = parsed.items[k];
      if (!pair.is_list || pair.items.size() != 2) throw Error("malformed get-value entry");
      const SExpr& value = pair.items[1];
      if (is_boolean(vocab_->sort(vars[k]))) {
        model_.set_bool(vars[k], !value.is_list && value.atom == "true");
      } else {
        model_.set_num(vars[k], sexpr_rational(value));
      }
    }
  }
  auto verify = [&](const Formula& f) {
    if (!evaluate(f, model_)) throw Error("external solver model fails an assertion");
  };
  for (const auto& f : base_) verify(f);
  for (const auto& frame : frames_) {
    for (const auto& f : frame) verify(f);
  }
  return SmtResult::Sat;
}

// ---------------------------------------------------------------- factory

SmtBackend SmtBackend::parse(const std::string& spec) {
  SmtBackend out;
  if (spec == "internal") return out;
  const std::string prefix = "external:";
  if (spec.rfind(prefix, 0) != 0 || spec.size() == prefix.size()) {
    throw UsageError("smt backend must be 'internal' or 'external:<path>'");
  }
  out.external = true;
  std::istringstream words(spec.substr(prefix.size()));
  for (std::string w; words >> w;) out.command.push_back(w);
  if (out.command.size() == 1) {
    std::string base = out.command[0].substr(out.command[0].find_last_of('/') + 1);
    if (base == "z3") out.command.emplace_back("-in");
    if (base == "cvc5") {
      out.command.insert(out.command.end(), {"--lang=smt2", "--incremental"});
    }
  }
  return out;
}

std::string SmtBackend::str() const {
  if (!external) return "internal";
  std::string out = "external:";
  for (std::size_t k = 0; k < command.size(); ++k) out += (k ? " " : "") + command[k];
  return out;
}

std::unique_ptr<SmtSolver> make_smt(const SmtBackend& backend, const Vocabulary& vocab) {
  if (backend.external) return std::make_unique<ExternalSmt>(vocab, backend.command);
  return std::make_unique<InternalSmt>(vocab);
}

// ---------------------------------------------------------------- enumeration

ModelEnumerator::ModelEnumerator(const Formula& f, const Vocabulary& vocab) : smt_(vocab) {
  if (!is_propositional(f)) throw UsageError("model enumeration needs a propositional formula");
  auto vars = bool_variables(f);
  vars_.assign(vars.begin(), vars.end());
  smt_.assert_formula(f);
}

std::optional<std::map<VarId, bool>> ModelEnumerator::next() {
  if (smt_.check() == SmtResult::Unsat) return std::nullopt;
  std::map<VarId, bool> out;
  for (VarId v : vars_) out.emplace(v, smt_.model().bool_value(v));
  ++returned_;
  return out;
}

void ModelEnumerator::block(const Formula& g) {
  if (!is_propositional(g)) throw UsageError("blocking formula must be propositional");
  smt_.assert_formula(g.negate());
}

std::vector<std::map<VarId, bool>> sat_all_models(const Formula& f, const Vocabulary& vocab) {
  ModelEnumerator enumerator(f, vocab);
  std::vector<std::map<VarId, bool>> out;
  while (auto m = enumerator.next()) {
    std::vector<Formula> lits;
    for (const auto& [v, b] : *m) lits.push_back(Formula::lit(v, b));
    enumerator.block(Formula::conj(std::move(lits)));
    out.push_back(std::move(*m));
  }
  return out;
}

}  // namespace maxstrat
