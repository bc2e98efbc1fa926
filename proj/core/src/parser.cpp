#include "maxstrat/parser.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "maxstrat/errors.hpp"
#include "maxstrat/smt.hpp"

namespace maxstrat {

namespace {

struct Token {
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
  bool open() const { return text == "("; }
  bool close() const { return text == ")"; }
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t k = 0;
  auto advance = [&] {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++k;
  };
  while (k < text.size()) {
    char c = text[k];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
    } else if (c == '#') {
      while (k < text.size() && text[k] != '\n') advance();
    } else if (c == '(' || c == ')') {
      out.push_back({std::string(1, c), line, col});
      advance();
    } else {
      Token t{"", line, col};
      while (k < text.size() && !std::isspace(static_cast<unsigned char>(text[k])) &&
             text[k] != '(' && text[k] != ')' && text[k] != '#') {
        t.text += text[k];
        advance();
      }
      out.push_back(std::move(t));
    }
  }
  out.push_back({"", line, col});  // end marker
  return out;
}

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
  std::size_t line = 1;
  std::size_t col = 1;

  bool is_atom() const { return !is_list; }
};

[[noreturn]] void fail(const std::string& message, std::size_t line, std::size_t col) {
  throw ParseError(message, line, col);
}

[[noreturn]] void fail(const std::string& message, const SExpr& at) {
  fail(message, at.line, at.col);
}

bool is_number(const std::string& text) {
  if (text.empty()) return false;
  std::size_t k = text[0] == '-' ? 1 : 0;
  return k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]));
}

bool is_identifier(const std::string& text) {
  if (text.empty() || !(std::isalpha(static_cast<unsigned char>(text[0])) || text[0] == '_')) {
    return false;
  }
  std::size_t end = text.size();
  if (text.back() == '\'') --end;
  for (std::size_t k = 0; k < end; ++k) {
    char c = text[k];
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  }
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  ModelFile parse_model() {
    ModelFile out;
    TransitionSystem& ts = out.system;
    std::optional<Formula> init;
    std::map<VarId, Rational> init_num;
    std::optional<Formula> transition;
    while (!at_end()) {
      const Token& kw = next();
      if (kw.text == "system") {
        ts.name = identifier("system name");
      } else if (kw.text == "bool") {
        declare([&](const std::string& n) { ts.add_bool(n); });
      } else if (kw.text == "num") {
        declare([&](const std::string& n) { ts.add_num(n); });
      } else if (kw.text == "input") {
        const Token& t = next();
        if (t.text != "num") fail("expected 'num' after 'input'", t.line, t.col);
        declare([&](const std::string& n) { ts.add_input(n); });
      } else if (kw.text == "choice") {
        declare([&](const std::string& n) { ts.add_choice(n); });
      } else if (kw.text == "init") {
        if (init) fail("duplicate init statement", kw.line, kw.col);
        SExpr e = sexpr("init expects an expression");
        init = bool_expr(ts.vocab(), e, Context::Init);
      } else if (kw.text == "init-num") {
        const Token& name = peek();
        std::string id = identifier("numeric variable");
        auto var = ts.vocab().find(id);
        if (!var || ts.vocab().sort(*var) != Sort::Num) {
          fail("'" + id + "' is not a numeric state variable", name.line, name.col);
        }
        const Token& eq = next();
        if (eq.text != "=") fail("expected '='", eq.line, eq.col);
        const Token& value = next();
        init_num[*var] = rational(value);
      } else if (kw.text == "transition") {
        if (transition) fail("duplicate transition statement", kw.line, kw.col);
        SExpr e = sexpr("transition expects an expression");
        transition = bool_expr(ts.vocab(), e, Context::Transition);
      } else if (kw.text == "template") {
        out.template_spec = template_statement(ts);
      } else {
        fail("unexpected '" + kw.text + "'", kw.line, kw.col);
      }
    }
    const Token& end = peek();
    if (!transition) fail("model has no transition", end.line, end.col);
    std::vector<Rational> x0;
    for (VarId v : ts.nums()) {
      auto it = init_num.find(v);
      if (it == init_num.end()) {
        fail("no init-num for '" + ts.vocab().name(v) + "'", end.line, end.col);
      }
      x0.push_back(it->second);
    }
    Formula init_bool = init.value_or(Formula::top());
    InternalSmt check(ts.vocab());
    check.assert_formula(init_bool);
    if (check.check() == SmtResult::Unsat) fail("initial condition is unsatisfiable", end.line, end.col);
    ts.set_init(init_bool, std::move(x0));
    ts.set_transition(*transition);
    return out;
  }

  TemplateSpec parse_template_only(const TransitionSystem& ts) {
    std::optional<TemplateSpec> spec;
    while (!at_end()) {
      const Token& kw = next();
      if (kw.text != "template") fail("expected 'template'", kw.line, kw.col);
      TemplateSpec part = template_statement(ts);
      if (!spec) {
        spec = std::move(part);
      } else if (spec->kind == TemplateSpec::Kind::Rows && part.kind == TemplateSpec::Kind::Rows) {
        for (auto& r : part.rows) spec->rows.push_back(std::move(r));
      } else {
        fail("conflicting template statements", kw.line, kw.col);
      }
    }
    if (!spec) fail("no template statement", peek().line, peek().col);
    return *spec;
  }

 private:
  enum class Context { Init, Transition };

  bool at_end() const { return pos_ + 1 >= tokens_.size(); }
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  std::string identifier(const std::string& what) {
    const Token& t = next();
    if (t.text.empty()) fail("expected " + what + ", found end of input", t.line, t.col);
    if (!is_identifier(t.text) || t.text.back() == '\'') {
      fail("expected " + what + ", found '" + t.text + "'", t.line, t.col);
    }
    return t.text;
  }

  template <class Fn>
  void declare(Fn fn) {
    const Token& at = peek();
    std::string id = identifier("identifier");
    try {
      fn(id);
    } catch (const UsageError& e) {
      fail(e.what(), at.line, at.col);
    }
  }

  static Rational rational(const Token& t) {
    if (!is_number(t.text)) fail("expected a rational, found '" + t.text + "'", t.line, t.col);
    try {
      return Rational::parse(t.text);
    } catch (const Error& e) {
      fail(e.what(), t.line, t.col);
    }
  }

  SExpr sexpr(const std::string& missing) {
    const Token& t = peek();
    if (t.text.empty() || t.close()) fail(missing, t.line, t.col);
    return read();
  }

  SExpr read() {
    const Token& t = next();
    SExpr e;
    e.line = t.line;
    e.col = t.col;
    if (t.text.empty()) fail("unexpected end of input", t.line, t.col);
    if (t.close()) fail("unexpected ')'", t.line, t.col);
    if (!t.open()) {
      e.atom = t.text;
      return e;
    }
    e.is_list = true;
    while (!peek().close()) {
      if (peek().text.empty()) fail("unbalanced '('", t.line, t.col);
      e.list.push_back(read());
    }
    next();
    return e;
  }

  TemplateSpec template_statement(const TransitionSystem& ts) {
    const Token& kind = next();
    TemplateSpec spec;
    try {
      spec.kind = TemplateSpec::parse_kind(kind.text);
    } catch (const UsageError& e) {
      fail(e.what(), kind.line, kind.col);
    }
    if (spec.kind != TemplateSpec::Kind::Rows) return spec;
    while (peek().open()) {
      SExpr row = read();
      TemplateRow out;
      for (const auto& term : row.list) {
        if (!term.is_list || term.list.size() != 2 || !term.list[0].is_atom() ||
            !term.list[1].is_atom()) {
          fail("template term must be (<coeff> <id>)", term);
        }
        Rational c = rational({term.list[0].atom, term.list[0].line, term.list[0].col});
        const std::string& id = term.list[1].atom;
        auto var = ts.vocab().find(id);
        if (!var || ts.vocab().sort(*var) != Sort::Num) {
          fail("'" + id + "' is not a numeric state variable", term.list[1]);
        }
        out.form[*var] += c;
      }
      std::erase_if(out.form, [](const auto& t) { return t.second.is_zero(); });
      if (out.form.empty()) fail("template row is empty", row);
      spec.rows.push_back(std::move(out));
    }
    if (spec.rows.empty()) fail("template rows needs at least one row", peek().line, peek().col);
    return spec;
  }

  static bool looks_boolean(const Vocabulary& vocab, const SExpr& e) {
    if (e.is_atom()) {
      if (e.atom == "true" || e.atom == "false") return true;
      auto var = vocab.find(e.atom);
      return var && is_boolean(vocab.sort(*var));
    }
    if (e.list.empty() || !e.list[0].is_atom()) return false;
    const std::string& head = e.list[0].atom;
    return head == "and" || head == "or" || head == "not" || head == "<=" || head == "<" ||
           head == ">=" || head == ">" || (head == "=" && e.list.size() == 3 &&
                                            looks_boolean(vocab, e.list[1]));
  }

  VarId variable(const Vocabulary& vocab, const SExpr& e, Context ctx) {
    if (!is_identifier(e.atom)) fail("unexpected '" + e.atom + "'", e);
    auto var = vocab.find(e.atom);
    if (!var) fail("undeclared variable '" + e.atom + "'", e);
    Sort s = vocab.sort(*var);
    if (ctx == Context::Init && s != Sort::StateBool) {
      fail("initial condition may only use state Booleans, not '" + e.atom + "'", e);
    }
    return *var;
  }

  Formula bool_expr(const Vocabulary& vocab, const SExpr& e, Context ctx) {
    if (e.is_atom()) {
      if (e.atom == "true") return Formula::top();
      if (e.atom == "false") return Formula::bottom();
      VarId v = variable(vocab, e, ctx);
      if (!is_boolean(vocab.sort(v))) fail("'" + e.atom + "' is not Boolean", e);
      return Formula::lit(v);
    }
    if (e.list.empty() || !e.list[0].is_atom()) fail("expected an operator", e);
    const std::string& head = e.list[0].atom;
    std::size_t argc = e.list.size() - 1;
    if (head == "and" || head == "or") {
      std::vector<Formula> kids;
      for (std::size_t k = 1; k < e.list.size(); ++k) kids.push_back(bool_expr(vocab, e.list[k], ctx));
      return head == "and" ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
    if (head == "not") {
      if (argc != 1) fail("'not' takes one argument", e);
      Formula inner = bool_expr(vocab, e.list[1], ctx);
      if (!is_propositional(inner)) fail("'not' applies to propositional formulas only", e);
      return inner.negate();
    }
    if (head == "<=" || head == "<" || head == ">=" || head == ">" || head == "=") {
      if (argc != 2) fail("'" + head + "' takes two arguments", e);
      if (head == "=" && looks_boolean(vocab, e.list[1])) {
        Formula a = bool_expr(vocab, e.list[1], ctx);
        Formula b = bool_expr(vocab, e.list[2], ctx);
        return Formula::disj({Formula::conj({a, b}), Formula::conj({a.negate(), b.negate()})});
      }
      if (ctx == Context::Init) fail("initial condition must be propositional", e);
      LinExpr lhs = lin_expr(vocab, e.list[1], ctx);
      LinExpr rhs = lin_expr(vocab, e.list[2], ctx);
      if (lhs.terms.empty() && rhs.terms.empty()) fail("comparison has no variable", e);
      if (head == "<=") return Formula::compare(lhs, Cmp::Le, rhs);
      if (head == "<") return Formula::compare(lhs, Cmp::Lt, rhs);
      if (head == ">=") return Formula::compare(rhs, Cmp::Le, lhs);
      if (head == ">") return Formula::compare(rhs, Cmp::Lt, lhs);
      return Formula::compare(lhs, Cmp::Eq, rhs);
    }
    fail("unknown operator '" + head + "'", e);
  }

  LinExpr lin_expr(const Vocabulary& vocab, const SExpr& e, Context ctx) {
    if (e.is_atom()) {
      if (is_number(e.atom)) return LinExpr::num(rational({e.atom, e.line, e.col}));
      VarId v = variable(vocab, e, ctx);
      if (is_boolean(vocab.sort(v))) fail("'" + e.atom + "' is Boolean, not numeric", e);
      return LinExpr::var(v);
    }
    if (e.list.size() < 2 || !e.list[0].is_atom()) fail("malformed linear expression", e);
    const std::string& head = e.list[0].atom;
    std::vector<LinExpr> args;
    for (std::size_t k = 1; k < e.list.size(); ++k) args.push_back(lin_expr(vocab, e.list[k], ctx));
    if (head == "+") {
      LinExpr sum;
      for (const auto& a : args) sum = sum + a;
      return sum;
    }
    if (head == "-") {
      if (args.size() == 1) return args[0] * Rational(-1);
      LinExpr out = args[0];
      for (std::size_t k = 1; k < args.size(); ++k) out = out - args[k];
      return out;
    }
    if (head == "*") {
      LinExpr out = LinExpr::num(Rational(1));
      for (const auto& a : args) {
        if (a.terms.empty()) {
          out = out * a.constant;
        } else if (out.terms.empty()) {
          out = a * out.constant;
        } else {
          fail("non-linear product", e);
        }
      }
      return out;
    }
    if (head == "/") {
      if (args.size() != 2 || !args[1].terms.empty()) fail("division by a non-constant", e);
      if (args[1].constant.is_zero()) fail("division by zero", e);
      return args[0] * (Rational(1) / args[1].constant);
    }
    fail("unknown operator '" + head + "'", e);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Template TemplateSpec::build(const TransitionSystem& ts) const {
  switch (kind) {
    case Kind::Box:
      return Template::box(ts);
    case Kind::Octagon:
      return Template::octagon(ts);
    case Kind::Rows:
      return Template::custom(ts, rows);
  }
  return Template::box(ts);
}

TemplateSpec::Kind TemplateSpec::parse_kind(std::string_view word) {
  if (word == "box") return Kind::Box;
  if (word == "octagon") return Kind::Octagon;
  if (word == "rows") return Kind::Rows;
  throw UsageError("unknown template '" + std::string(word) + "' (expected box, octagon or rows)");
}

ModelFile parse_model(std::string_view text) { return Parser(text).parse_model(); }

TransitionSystem parse_system(std::string_view text) { return parse_model(text).system; }

TemplateSpec parse_template(std::string_view text, const TransitionSystem& ts) {
  return Parser(text).parse_template_only(ts);
}

std::string print_system(const TransitionSystem& ts) {
  const Vocabulary& vocab = ts.vocab();
  std::ostringstream out;
  out << "system " << ts.name << "\n";
  for (VarId v = 0; v < vocab.size(); ++v) {
    switch (vocab.sort(v)) {
      case Sort::StateBool:
        out << "bool " << vocab.name(v) << "\n";
        break;
      case Sort::Num:
        out << "num " << vocab.name(v) << "\n";
        break;
      case Sort::InputNum:
        out << "input num " << vocab.name(v) << "\n";
        break;
      case Sort::ChoiceBool:
        out << "choice " << vocab.name(v) << "\n";
        break;
      default:
        break;
    }
  }
  out << "init " << to_string(ts.init_bool(), vocab) << "\n";
  for (std::size_t k = 0; k < ts.m(); ++k) {
    out << "init-num " << vocab.name(ts.nums()[k]) << " = " << ts.init_num()[k].str() << "\n";
  }
  out << "transition " << to_string(ts.transition(), vocab) << "\n";
  return out.str();
}

}  // namespace maxstrat
