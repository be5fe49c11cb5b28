#include "owa/parser.hpp"

#include <fstream>
#include <sstream>

#include "owa/errors.hpp"

namespace owa {
namespace {

struct SExpr {
  bool is_list = false;
  std::string symbol;
  std::vector<SExpr> items;
  int line = 0;
  int col = 0;

  bool is_symbol() const { return !is_list; }
};

struct Token {
  enum Kind { LParen, RParen, Symbol, End } kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_ws();
    if (pos_ >= text_.size()) return {Token::End, "", line_, col_};
    int line = line_, col = col_;
    char c = text_[pos_];
    if (c == '(') {
      advance();
      return {Token::LParen, "(", line, col};
    }
    if (c == ')') {
      advance();
      return {Token::RParen, ")", line, col};
    }
    std::string sym;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d)))
        break;
      sym += d;
      advance();
    }
    return {Token::Symbol, sym, line, col};
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

SExpr read_expr(Lexer& lex, const Token& tok) {
  if (tok.kind == Token::End)
    throw ParseError("unexpected end of input", tok.line, tok.col);
  if (tok.kind == Token::RParen)
    throw ParseError("unexpected ')'", tok.line, tok.col);
  if (tok.kind == Token::Symbol) {
    SExpr e;
    e.symbol = tok.text;
    e.line = tok.line;
    e.col = tok.col;
    return e;
  }
  SExpr e;
  e.is_list = true;
  e.line = tok.line;
  e.col = tok.col;
  while (true) {
    Token t = lex.next();
    if (t.kind == Token::End)
      throw ParseError("missing ')'", e.line, e.col);
    if (t.kind == Token::RParen) return e;
    e.items.push_back(read_expr(lex, t));
  }
}

SExpr read_document(const std::string& text) {
  Lexer lex(text);
  Token t = lex.next();
  if (t.kind == Token::End) throw ParseError("empty document", 1, 1);
  SExpr e = read_expr(lex, t);
  Token rest = lex.next();
  if (rest.kind != Token::End)
    throw ParseError("trailing content after top-level form", rest.line, rest.col);
  return e;
}

const SExpr& expect_list(const SExpr& e, const char* what) {
  if (!e.is_list)
    throw ParseError(std::string("expected ") + what, e.line, e.col);
  return e;
}

const std::string& expect_symbol(const SExpr& e, const char* what) {
  if (e.is_list || e.symbol.empty())
    throw ParseError(std::string("expected ") + what, e.line, e.col);
  return e.symbol;
}

bool is_var(const std::string& s) { return !s.empty() && s[0] == '?'; }

// Parses "name+ - type" groups into (name, type) pairs.
std::vector<std::pair<std::string, std::string>> parse_typed_list(
    const std::vector<SExpr>& items, size_t begin, const SExpr& ctx) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> pending;
  for (size_t i = begin; i < items.size(); ++i) {
    const std::string& s = expect_symbol(items[i], "name or '-'");
    if (s == "-") {
      if (pending.empty())
        throw ParseError("type dash with no preceding names", items[i].line,
                         items[i].col);
      if (i + 1 >= items.size())
        throw ParseError("missing type after '-'", items[i].line, items[i].col);
      const std::string& t = expect_symbol(items[i + 1], "type name");
      for (const auto& name : pending) out.emplace_back(name, t);
      pending.clear();
      ++i;
    } else {
      pending.push_back(s);
    }
  }
  if (!pending.empty())
    throw ParseError("names without a type in typed list", ctx.line, ctx.col);
  return out;
}

Atom parse_atom(const SExpr& e) {
  expect_list(e, "atom");
  if (e.items.empty())
    throw ParseError("empty atom", e.line, e.col);
  Atom a;
  a.predicate = expect_symbol(e.items[0], "predicate name");
  for (size_t i = 1; i < e.items.size(); ++i)
    a.args.push_back(expect_symbol(e.items[i], "term"));
  return a;
}

// CONJ := (and ATOM*) | ATOM | (). Effects additionally allow (not ATOM).
void parse_conjunction(const SExpr& e, bool allow_not, AtomSet& pos, AtomSet* neg) {
  expect_list(e, "conjunction");
  if (e.items.empty()) return;
  std::vector<const SExpr*> parts;
  if (e.items[0].is_symbol() && e.items[0].symbol == "and") {
    for (size_t i = 1; i < e.items.size(); ++i) parts.push_back(&e.items[i]);
  } else {
    parts.push_back(&e);
  }
  for (const SExpr* p : parts) {
    expect_list(*p, "atom");
    if (!p->items.empty() && p->items[0].is_symbol() && p->items[0].symbol == "not") {
      if (!allow_not || neg == nullptr)
        throw ParseError("'not' is only allowed in effects", p->line, p->col);
      if (p->items.size() != 2)
        throw ParseError("'not' takes exactly one atom", p->line, p->col);
      neg->insert(parse_atom(p->items[1]));
    } else {
      pos.insert(parse_atom(*p));
    }
  }
}

void check_header(const SExpr& doc, const char* kind, std::string* name) {
  expect_list(doc, "document");
  if (doc.items.size() < 2 || !doc.items[0].is_symbol() ||
      doc.items[0].symbol != "define")
    throw ParseError("expected (define ...)", doc.line, doc.col);
  const SExpr& hdr = expect_list(doc.items[1], "header");
  if (hdr.items.size() != 2 || !hdr.items[0].is_symbol() ||
      hdr.items[0].symbol != kind)
    throw ParseError(std::string("expected (") + kind + " NAME)", hdr.line, hdr.col);
  *name = expect_symbol(hdr.items[1], "name");
}

}  // namespace

Domain parse_domain(const std::string& text) {
  SExpr doc = read_document(text);
  Domain d;
  check_header(doc, "domain", &d.name);

  for (size_t i = 2; i < doc.items.size(); ++i) {
    const SExpr& sec = expect_list(doc.items[i], "section");
    if (sec.items.empty())
      throw ParseError("empty section", sec.line, sec.col);
    const std::string& tag = expect_symbol(sec.items[0], "section tag");

    if (tag == ":types") {
      for (size_t j = 1; j < sec.items.size(); ++j) {
        const std::string& t = expect_symbol(sec.items[j], "type name");
        if (!d.types.insert(t).second)
          throw DuplicateNameError("duplicate type '" + t + "'", sec.items[j].line,
                                   sec.items[j].col);
      }
    } else if (tag == ":constants") {
      for (auto& [name, type] : parse_typed_list(sec.items, 1, sec)) {
        if (!d.has_type(type))
          throw TypeError("unknown type '" + type + "'", sec.line, sec.col);
        if (d.entities.count(name))
          throw DuplicateNameError("duplicate entity '" + name + "'", sec.line,
                                   sec.col);
        d.entities[name] = type;
      }
    } else if (tag == ":predicates") {
      for (size_t j = 1; j < sec.items.size(); ++j) {
        const SExpr& p = expect_list(sec.items[j], "predicate declaration");
        if (p.items.empty())
          throw ParseError("empty predicate declaration", p.line, p.col);
        std::string pname = expect_symbol(p.items[0], "predicate name");
        std::vector<std::string> ptypes;
        for (auto& [var, type] : parse_typed_list(p.items, 1, p)) {
          if (!is_var(var))
            throw ParseError("predicate parameters must be variables", p.line, p.col);
          if (!d.has_type(type))
            throw TypeError("unknown type '" + type + "'", p.line, p.col);
          ptypes.push_back(type);
        }
        if (d.predicates.count(pname))
          throw DuplicateNameError("duplicate predicate '" + pname + "'", p.line,
                                   p.col);
        d.predicates[pname] = ptypes;
      }
    } else if (tag == ":action") {
      if (sec.items.size() < 2)
        throw ParseError("action needs a name", sec.line, sec.col);
      LiftedOperator op;
      op.name = expect_symbol(sec.items[1], "action name");
      if (d.find_operator(op.name))
        throw DuplicateNameError("duplicate action '" + op.name + "'", sec.line,
                                 sec.col);
      size_t j = 2;
      while (j < sec.items.size()) {
        const std::string& kw = expect_symbol(sec.items[j], "action keyword");
        if (j + 1 >= sec.items.size())
          throw ParseError("missing value after " + kw, sec.items[j].line,
                           sec.items[j].col);
        const SExpr& val = sec.items[j + 1];
        if (kw == ":parameters") {
          expect_list(val, "parameter list");
          for (auto& [var, type] : parse_typed_list(val.items, 0, val)) {
            if (!is_var(var))
              throw ParseError("parameters must be variables", val.line, val.col);
            op.params.push_back({var, type});
          }
        } else if (kw == ":precondition") {
          parse_conjunction(val, false, op.preconditions, nullptr);
        } else if (kw == ":effect") {
          parse_conjunction(val, true, op.add_effects, &op.delete_effects);
        } else {
          throw ParseError("unknown action keyword " + kw, sec.items[j].line,
                           sec.items[j].col);
        }
        j += 2;
      }
      d.operators.push_back(op);
    } else {
      throw ParseError("unknown section " + tag, sec.line, sec.col);
    }
  }

  std::sort(d.operators.begin(), d.operators.end(),
            [](const LiftedOperator& a, const LiftedOperator& b) {
              return a.name < b.name;
            });
  for (const auto& op : d.operators) d.check_operator(op);
  return d;
}

PlanningTask parse_problem(const std::string& text, const Domain& domain) {
  SExpr doc = read_document(text);
  PlanningTask task;
  task.domain = domain;
  check_header(doc, "problem", &task.name);

  bool saw_domain = false;
  for (size_t i = 2; i < doc.items.size(); ++i) {
    const SExpr& sec = expect_list(doc.items[i], "section");
    if (sec.items.empty())
      throw ParseError("empty section", sec.line, sec.col);
    const std::string& tag = expect_symbol(sec.items[0], "section tag");

    if (tag == ":domain") {
      if (sec.items.size() != 2)
        throw ParseError(":domain takes one name", sec.line, sec.col);
      const std::string& dn = expect_symbol(sec.items[1], "domain name");
      if (dn != domain.name)
        throw ParseError("problem requires domain '" + dn + "', got '" +
                             domain.name + "'",
                         sec.line, sec.col);
      saw_domain = true;
    } else if (tag == ":objects") {
      // Objects are declared in the domain; a problem may restate them for
      // readability but cannot introduce new ones.
      for (auto& [name, type] : parse_typed_list(sec.items, 1, sec)) {
        auto et = domain.entity_type(name);
        if (!et)
          throw UnknownEntityError("entity '" + name + "' not declared in domain",
                                   sec.line, sec.col);
        if (*et != type)
          throw TypeError("entity '" + name + "' has type " + *et + ", not " + type,
                          sec.line, sec.col);
      }
    } else if (tag == ":init") {
      for (size_t j = 1; j < sec.items.size(); ++j) {
        Atom a = parse_atom(sec.items[j]);
        if (!a.is_ground())
          throw ParseError("init atoms must be ground", sec.items[j].line,
                           sec.items[j].col);
        domain.check_atom(a);
        task.initial.atoms.insert(a);
      }
    } else if (tag == ":goal") {
      if (sec.items.size() != 2)
        throw ParseError(":goal takes one conjunction", sec.line, sec.col);
      parse_conjunction(sec.items[1], false, task.goal, nullptr);
      for (const auto& a : task.goal) {
        if (!a.is_ground())
          throw ParseError("goal atoms must be ground", sec.line, sec.col);
        domain.check_atom(a);
      }
    } else {
      throw ParseError("unknown section " + tag, sec.line, sec.col);
    }
  }
  if (!saw_domain)
    throw ParseError("problem is missing (:domain ...)", doc.line, doc.col);
  return task;
}

namespace {

void write_typed_pairs(std::ostringstream& out,
                       const std::vector<std::pair<std::string, std::string>>& pairs) {
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (i) out << ' ';
    out << pairs[i].first << " - " << pairs[i].second;
  }
}

void write_conjunction(std::ostringstream& out, const AtomSet& pos,
                       const AtomSet& neg) {
  out << "(and";
  for (const auto& a : pos) out << ' ' << a.str();
  for (const auto& a : neg) out << " (not " << a.str() << ')';
  out << ')';
}

}  // namespace

std::string serialize_domain(const Domain& d) {
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  out << "  (:types";
  for (const auto& t : d.types) out << ' ' << t;
  out << ")\n";
  out << "  (:constants ";
  {
    std::vector<std::pair<std::string, std::string>> pairs(d.entities.begin(),
                                                           d.entities.end());
    write_typed_pairs(out, pairs);
  }
  out << ")\n";
  out << "  (:predicates";
  for (const auto& [name, types] : d.predicates) {
    out << " (" << name;
    for (size_t i = 0; i < types.size(); ++i)
      out << " ?a" << i << " - " << types[i];
    out << ')';
  }
  out << ")\n";
  for (const auto& op : d.operators) {
    out << "  (:action " << op.name << "\n    :parameters (";
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& p : op.params) pairs.emplace_back(p.var, p.type);
    write_typed_pairs(out, pairs);
    out << ")\n    :precondition ";
    write_conjunction(out, op.preconditions, {});
    out << "\n    :effect ";
    write_conjunction(out, op.add_effects, op.delete_effects);
    out << ")\n";
  }
  out << ")\n";
  return out.str();
}

std::string serialize_problem(const PlanningTask& task) {
  std::ostringstream out;
  out << "(define (problem " << task.name << ")\n";
  out << "  (:domain " << task.domain.name << ")\n";
  out << "  (:init";
  for (const auto& a : task.initial.atoms) out << ' ' << a.str();
  out << ")\n";
  out << "  (:goal ";
  write_conjunction(out, task.goal, {});
  out << ")\n)\n";
  return out.str();
}

namespace {
std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FixtureError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

Domain load_domain_file(const std::string& path) {
  return parse_domain(read_file(path));
}

PlanningTask load_problem_file(const std::string& path, const Domain& domain) {
  return parse_problem(read_file(path), domain);
}

}  // namespace owa
