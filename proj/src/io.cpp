#include "nullcore/io.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "nullcore/error.hpp"

namespace nullcore {
namespace {

enum class Tok { Ident, Var, Quoted, Number, Null, QueryName, Implies, Tilde, LParen, RParen, Comma, Dot, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    Token t{Tok::End, "", line_, col_};
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (c == '(') return single(Tok::LParen);
    if (c == ')') return single(Tok::RParen);
    if (c == ',') return single(Tok::Comma);
    if (c == '.') return single(Tok::Dot);
    if (c == '~') return single(Tok::Tilde);
    if (c == ':' && peek(1) == '-') {
      advance(2);
      t.kind = Tok::Implies;
      t.text = ":-";
      return t;
    }
    if (c == '"') {
      t.kind = Tok::Quoted;
      t.text = quoted();
      return t;
    }
    if (c == '?') {
      advance(1);
      t.kind = Tok::QueryName;
      t.text = word();
      if (t.text.empty()) fail(t, "expected query name after '?'");
      return t;
    }
    if (c == '_' && peek(1) == ':') {
      advance(2);
      t.kind = Tok::Null;
      t.text = word();
      if (t.text.size() < 2 || t.text[0] != 'n' ||
          !std::all_of(t.text.begin() + 1, t.text.end(), [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
        fail(t, "malformed null '_:" + t.text + "'");
      }
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Tok::Number;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) t.text += take();
      return t;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      t.kind = Tok::Ident;
      t.text = word();
      return t;
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      t.kind = Tok::Var;
      // '#' is accepted so that renamed-apart rules print and re-parse.
      while (pos_ < text_.size() && (ident_char(text_[pos_]) || text_[pos_] == '#')) t.text += take();
      return t;
    }
    fail(t, std::string("unexpected character '") + c + "'");
    return t;
  }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw SyntaxError(t.line, t.column, msg); }

 private:
  char peek(std::size_t k) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  char take() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) take();
  }

  Token single(Tok kind) {
    Token t{kind, std::string(1, text_[pos_]), line_, col_};
    take();
    return t;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }

  std::string word() {
    std::string out;
    while (pos_ < text_.size() && ident_char(text_[pos_])) out += take();
    return out;
  }

  std::string quoted() {
    Token start{Tok::Quoted, "", line_, col_};
    take();
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail(start, "unterminated string");
      char c = take();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail(start, "unterminated string");
        out += take();
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, ParseOptions options) : lexer_(text), options_(options) { cur_ = lexer_.next(); }

  template <typename F>
  auto located(const Token& at, F&& f) {
    try {
      return f();
    } catch (const SyntaxError&) {
      throw;
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(at.line) + ": " + e.what());
    }
  }

  Program program() {
    Program prog;
    std::vector<Rule> rules;
    while (cur_.kind != Tok::End) {
      Token start = cur_;
      if (cur_.kind == Tok::QueryName) {
        prog.queries.push_back(query(prog.signature));
        continue;
      }
      std::vector<Atom> head = atoms(nullptr);
      if (cur_.kind == Tok::Implies) {
        next();
        Body body = body_atoms();
        expect(Tok::Dot, "'.'");
        RuleSyntax rs;
        rs.id = "r" + std::to_string(rules.size() + 1);
        rs.head = std::move(head);
        rs.body_positive = std::move(body.positive);
        rs.body_negative = std::move(body.negative);
        auto body_vars = variables_of(rs.body_positive);
        for (const auto& v : variables_of(rs.head)) {
          if (std::find(body_vars.begin(), body_vars.end(), v) == body_vars.end()) rs.existential.push_back(v);
        }
        rules.push_back(located(start, [&] { return validate_rule(rs, &prog.signature); }));
      } else {
        expect(Tok::Dot, "'.' or ':-'");
        for (auto& a : head) add_fact(prog, a, start);
      }
    }
    prog.rules = RuleSet(std::move(rules));
    return prog;
  }

  Interpretation facts(Signature& signature) {
    Interpretation out;
    while (cur_.kind != Tok::End) {
      Token start = cur_;
      std::vector<Atom> list = atoms(nullptr);
      expect(Tok::Dot, "'.'");
      for (auto& a : list) {
        check_fact(a, start);
        located(start, [&] {
          signature.check_and_register(a, "fact " + a.to_string());
          return 0;
        });
        out.insert(a);
      }
    }
    return out;
  }

 private:
  struct Body {
    std::vector<Atom> positive;
    std::vector<Atom> negative;
  };

  void next() { cur_ = lexer_.next(); }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) Lexer::fail(cur_, std::string("expected ") + what + describe());
    next();
  }

  std::string describe() const {
    if (cur_.kind == Tok::End) return " but reached end of input";
    return " but found '" + cur_.text + "'";
  }

  Term term() {
    Token t = cur_;
    switch (t.kind) {
      case Tok::Var: next(); return Term::variable(t.text);
      case Tok::Ident:
      case Tok::Quoted:
      case Tok::Number: next(); return Term::constant(t.text);
      case Tok::Null:
        if (!options_.allow_nulls) Lexer::fail(t, "nulls are not allowed here");
        next();
        return Term::null(std::stoull(t.text.substr(1)));
      default: Lexer::fail(t, "expected a term" + describe());
    }
  }

  Atom atom() {
    if (cur_.kind != Tok::Ident) Lexer::fail(cur_, "expected a predicate name" + describe());
    Atom a;
    a.predicate = Symbol(cur_.text);
    next();
    if (cur_.kind != Tok::LParen) return a;
    next();
    if (cur_.kind != Tok::RParen) {
      a.args.push_back(term());
      while (cur_.kind == Tok::Comma) {
        next();
        a.args.push_back(term());
      }
    }
    expect(Tok::RParen, "')'");
    return a;
  }

  std::vector<Atom> atoms(std::vector<Atom>* negative) {
    std::vector<Atom> out;
    while (true) {
      if (cur_.kind == Tok::Tilde) {
        if (!negative) Lexer::fail(cur_, "negation is only allowed in rule bodies and queries");
        next();
        negative->push_back(atom());
      } else {
        out.push_back(atom());
      }
      if (cur_.kind != Tok::Comma) break;
      next();
    }
    return out;
  }

  Body body_atoms() {
    Body b;
    b.positive = atoms(&b.negative);
    return b;
  }

  Query query(Signature& signature) {
    Token start = cur_;
    QuerySyntax qs;
    qs.name = cur_.text;
    next();
    expect(Tok::Implies, "':-'");
    Body body = body_atoms();
    expect(Tok::Dot, "'.'");
    qs.positive = std::move(body.positive);
    qs.negative = std::move(body.negative);
    return located(start, [&] { return validate_query(qs, &signature); });
  }

  void check_fact(const Atom& a, const Token& at) {
    for (const auto& t : a.args) {
      if (t.is_variable()) {
        throw Error(ErrorCode::VariableInFact,
                    "line " + std::to_string(at.line) + ": fact " + a.to_string() + " contains variable " + t.to_string());
      }
    }
  }

  void add_fact(Program& prog, const Atom& a, const Token& at) {
    check_fact(a, at);
    located(at, [&] {
      prog.signature.check_and_register(a, "fact " + a.to_string());
      return 0;
    });
    prog.facts.insert(a);
  }

  Lexer lexer_;
  ParseOptions options_;
  Token cur_;
};

bool plain_identifier(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), ident_char);
}

bool plain_number(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string join(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i];
  }
  return out + "]";
}

// r2 before r10.
bool id_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool edge_less(const Edge& a, const Edge& b) {
  if (a.first != b.first) return id_less(a.first, b.first);
  return id_less(a.second, b.second);
}

std::vector<std::string> position_strings(std::vector<Position> ps) {
  std::sort(ps.begin(), ps.end(), name_order);
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.to_string());
  return out;
}

std::vector<std::string> edge_strings(std::vector<Edge> es) {
  std::sort(es.begin(), es.end(), edge_less);
  std::vector<std::string> out;
  for (const auto& [a, b] : es) out.push_back(a + " -> " + b);
  return out;
}

std::vector<std::vector<std::string>> sorted_strata(const std::vector<std::vector<std::string>>& strata) {
  auto out = strata;
  for (auto& s : out) std::sort(s.begin(), s.end(), id_less);
  return out;
}

void write_atoms(std::ostringstream& os, const std::vector<Atom>& atoms, const char* prefix = "") {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0) os << ", ";
    os << prefix << format_atom(atoms[i]);
  }
}

}  // namespace

Program parse_program(std::string_view text, ParseOptions options) {
  Parser p(text, options);
  return p.program();
}

Interpretation parse_facts(std::string_view text, Signature* signature) {
  Signature local;
  Parser p(text, ParseOptions{.allow_nulls = true});
  return p.facts(signature ? *signature : local);
}

std::string format_term(const Term& t) {
  if (!t.is_constant()) return t.to_string();
  auto name = t.name();
  if (plain_identifier(name) || plain_number(name)) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string format_atom(const Atom& a) {
  std::string out(a.predicate.str());
  if (a.args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i > 0) out += ',';
    out += format_term(a.args[i]);
  }
  return out + ')';
}

std::string format_rule(const Rule& r) {
  std::ostringstream os;
  write_atoms(os, r.head());
  os << " :- ";
  write_atoms(os, r.body_positive());
  if (!r.body_negative().empty()) {
    os << ", ";
    write_atoms(os, r.body_negative(), "~");
  }
  os << " .";
  return os.str();
}

std::string format_query(const Query& q) {
  std::ostringstream os;
  os << "?" << q.name() << " :- ";
  write_atoms(os, q.positive());
  if (!q.negative().empty()) {
    os << ", ";
    write_atoms(os, q.negative(), "~");
  }
  os << " .";
  return os.str();
}

std::string emit_facts(const Interpretation& instance) {
  std::vector<std::string> lines;
  for (const auto& a : instance) lines.push_back(format_atom(a) + ".");
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string emit_report(const AnalysisReport& report) {
  std::ostringstream os;
  os << "jointly_affected: " << join(position_strings(report.jointly_affected)) << "\n";
  os << "restraints: " << join(edge_strings(report.restraints)) << "\n";
  auto rv = report.restrained_variables;
  std::sort(rv.begin(), rv.end());
  os << "restrained_variables: " << join(rv) << "\n";
  os << "core_safe_positions: " << join(position_strings(report.core_safe_positions)) << "\n";
  os << "positive_reliances: " << join(edge_strings(report.positive_reliances)) << "\n";
  os << "negative_reliances: " << join(edge_strings(report.negative_reliances)) << "\n";
  os << "stratification: ";
  if (!report.stratification) {
    os << "none\n";
  } else {
    std::vector<std::string> strata;
    for (const auto& s : sorted_strata(*report.stratification)) {
      std::string inner = join(s);
      strata.push_back("{" + inner.substr(1, inner.size() - 2) + "}");
    }
    os << join(strata) << "\n";
  }
  auto qc = report.query_classifications;
  std::sort(qc.begin(), qc.end());
  std::vector<std::string> qcs;
  for (const auto& [n, l] : qc) qcs.push_back(n + ": " + l);
  os << "query_classifications: " << join(qcs) << "\n";
  auto answers = report.answers;
  std::sort(answers.begin(), answers.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  std::vector<std::string> as;
  for (const auto& a : answers) {
    as.push_back(a.name + ": entailed=" + (a.entailed ? "true" : "false") + " level=" + a.level + " model=" + a.model_used);
  }
  os << "answers: " << join(as) << "\n";
  return os.str();
}

std::string emit_report_json(const AnalysisReport& report) {
  using nlohmann::ordered_json;
  auto edges = [](std::vector<Edge> es) {
    std::sort(es.begin(), es.end(), edge_less);
    ordered_json arr = ordered_json::array();
    for (const auto& [a, b] : es) arr.push_back(ordered_json::array({a, b}));
    return arr;
  };
  ordered_json j;
  j["jointly_affected"] = position_strings(report.jointly_affected);
  j["restraints"] = edges(report.restraints);
  auto rv = report.restrained_variables;
  std::sort(rv.begin(), rv.end());
  j["restrained_variables"] = rv;
  j["core_safe_positions"] = position_strings(report.core_safe_positions);
  j["positive_reliances"] = edges(report.positive_reliances);
  j["negative_reliances"] = edges(report.negative_reliances);
  if (report.stratification) {
    j["stratification"] = sorted_strata(*report.stratification);
  } else {
    j["stratification"] = nullptr;
  }
  auto qc = report.query_classifications;
  std::sort(qc.begin(), qc.end());
  ordered_json qj = ordered_json::object();
  for (const auto& [n, l] : qc) qj[n] = l;
  j["query_classifications"] = qj;
  auto answers = report.answers;
  std::sort(answers.begin(), answers.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  ordered_json aj = ordered_json::array();
  for (const auto& a : answers) {
    aj.push_back({{"name", a.name}, {"entailed", a.entailed}, {"level", a.level}, {"model_used", a.model_used}});
  }
  j["answers"] = aj;
  return j.dump(2) + "\n";
}

}  // namespace nullcore
