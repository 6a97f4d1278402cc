#include "tabcop/problem.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace tabcop {

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + msg),
      line_(line), column_(column) {}

VarId VarScope::id_for(const std::string& name) {
  auto [it, inserted] = ids_.emplace(name, static_cast<VarId>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

bool is_variable_name(std::string_view name) {
  return !name.empty() && (std::isupper(static_cast<unsigned char>(name[0])) || name[0] == '_');
}

SyntaxReader::SyntaxReader(std::string_view text, std::size_t first_line)
    : text_(text), line_(first_line) {}

bool SyntaxReader::is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

void SyntaxReader::skip_space() {
  while (pos_ < text_.size()) {
    const char c = text_[pos_];
    if (c == '\n') {
      ++line_;
      col_ = 1;
      ++pos_;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++col_;
      ++pos_;
    } else if (c == '%') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    } else {
      break;
    }
  }
}

bool SyntaxReader::at_end() {
  skip_space();
  return pos_ >= text_.size();
}

char SyntaxReader::peek() {
  skip_space();
  return pos_ < text_.size() ? text_[pos_] : '\0';
}

bool SyntaxReader::try_consume(std::string_view token) {
  skip_space();
  if (text_.substr(pos_, token.size()) != token) return false;
  pos_ += token.size();
  col_ += token.size();
  return true;
}

void SyntaxReader::expect(std::string_view token) {
  if (!try_consume(token)) fail("expected '" + std::string(token) + "'");
}

void SyntaxReader::fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

std::string SyntaxReader::read_ident() {
  skip_space();
  const std::size_t start = pos_;
  while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
  if (pos_ == start) fail("expected identifier");
  col_ += pos_ - start;
  return std::string(text_.substr(start, pos_ - start));
}

std::string SyntaxReader::read_word() {
  skip_space();
  const std::size_t start = pos_;
  while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  if (pos_ == start) fail("expected a word");
  col_ += pos_ - start;
  return std::string(text_.substr(start, pos_ - start));
}

std::size_t SyntaxReader::read_index() {
  const std::string w = read_ident();
  std::size_t value = 0;
  for (char c : w) {
    if (!std::isdigit(static_cast<unsigned char>(c))) fail("expected a non-negative integer");
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  return value;
}

Term SyntaxReader::read_term(VarScope& scope) {
  std::string name = read_ident();
  if (is_variable_name(name)) {
    if (peek() == '(') fail("variable '" + name + "' applied to arguments");
    return Term::var(scope.id_for(name));
  }
  std::vector<Term> args;
  if (try_consume("(")) {
    do {
      args.push_back(read_term(scope));
    } while (try_consume(","));
    expect(")");
  }
  return Term::app(std::move(name), std::move(args));
}

Literal SyntaxReader::read_literal(VarScope& scope) {
  const bool negated = try_consume("-");
  if (try_consume("#")) return Literal{!negated, Term::app("#")};
  Term lhs = read_term(scope);
  if (try_consume("!=")) {
    Term rhs = read_term(scope);
    return Literal{negated, Term::app("=", {std::move(lhs), std::move(rhs)})};
  }
  if (try_consume("=")) {
    Term rhs = read_term(scope);
    return Literal{!negated, Term::app("=", {std::move(lhs), std::move(rhs)})};
  }
  if (lhs.is_var()) fail("variable used as an atom");
  return Literal{!negated, std::move(lhs)};
}

namespace {

void register_symbol(std::map<std::string, SymbolInfo>& table, const std::string& name,
                     SymbolInfo info, std::size_t clause_id) {
  auto [it, inserted] = table.emplace(name, info);
  if (inserted || it->second == info) return;
  std::ostringstream msg;
  msg << "symbol '" << name << "' used with arity " << info.arity << " as a "
      << (info.kind == SymbolKind::predicate ? "predicate" : "function") << " in clause "
      << clause_id << " but earlier with arity " << it->second.arity << " as a "
      << (it->second.kind == SymbolKind::predicate ? "predicate" : "function");
  throw ArityError(msg.str());
}

void register_term(std::map<std::string, SymbolInfo>& table, const Term& t, std::size_t cid) {
  if (t.is_var()) return;
  register_symbol(table, t.symbol(), SymbolInfo{t.arity(), SymbolKind::function}, cid);
  for (const Term& a : t.args()) register_term(table, a, cid);
}

Clause parse_clause_text(std::string_view text, std::size_t id) {
  SyntaxReader reader(text);
  VarScope scope;
  Clause c;
  c.id = id;
  do {
    c.literals.push_back(reader.read_literal(scope));
  } while (reader.try_consume("|"));
  reader.expect(".");
  c.var_names = scope.names();
  return c;
}

} // namespace

void finalize_matrix(Matrix& m) {
  m.symbols.clear();
  m.start_ids.clear();
  for (std::size_t i = 0; i < m.clauses.size(); ++i) {
    Clause& c = m.clauses[i];
    c.id = i;
    for (const Literal& l : c.literals) {
      register_symbol(m.symbols, l.predicate(), SymbolInfo{l.atom.arity(), SymbolKind::predicate},
                      i);
      for (const Term& a : l.args()) register_term(m.symbols, a, i);
    }
  }
  for (const Clause& c : m.clauses) {
    for (const Literal& l : c.literals) {
      if (l.predicate() == "#") {
        m.start_ids.push_back(c.id);
        break;
      }
    }
  }
  if (!m.start_ids.empty()) return;
  for (const Clause& c : m.clauses) {
    bool all_positive = true;
    for (const Literal& l : c.literals) all_positive = all_positive && l.positive;
    if (all_positive) m.start_ids.push_back(c.id);
  }
}

Matrix parse_problem(std::string_view text) {
  SyntaxReader reader(text);
  Matrix m;
  while (!reader.at_end()) {
    VarScope scope;
    Clause c;
    c.id = m.clauses.size();
    do {
      c.literals.push_back(reader.read_literal(scope));
    } while (reader.try_consume("|"));
    reader.expect(".");
    c.var_names = scope.names();
    m.clauses.push_back(std::move(c));
  }
  if (m.clauses.empty()) throw ParseError("problem contains no clauses", reader.line(), 1);
  finalize_matrix(m);
  return m;
}

Matrix load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string print_problem(const Matrix& m) {
  std::string out;
  for (const Clause& c : m.clauses) {
    out += to_string(c);
    out += '\n';
  }
  return out;
}

Matrix generate_equality_axioms(const Matrix& m) {
  if (!m.has_equality()) return m;
  std::vector<std::string> axioms = {
      "X != X.",
      "X = Y | Y != X.",
      "X = Y | Y = Z | X != Z.",
  };
  auto arg_list = [](std::size_t arity, std::size_t replaced, const char* var) {
    std::string s = "(";
    for (std::size_t j = 0; j < arity; ++j) {
      if (j) s += ',';
      s += j == replaced ? std::string(var) : "Z" + std::to_string(j + 1);
    }
    return s + ")";
  };
  for (const auto& [name, info] : m.symbols) {
    if (info.arity == 0 || name == "=" || name == "#") continue;
    for (std::size_t i = 0; i < info.arity; ++i) {
      const std::string before = name + arg_list(info.arity, i, "X");
      const std::string after = name + arg_list(info.arity, i, "Y");
      if (info.kind == SymbolKind::function) {
        axioms.push_back("X = Y | " + before + " != " + after + ".");
      } else {
        axioms.push_back("X = Y | " + before + " | -" + after + ".");
      }
    }
  }

  Matrix out = m;
  std::set<std::string> present;
  for (const Clause& c : out.clauses) present.insert(to_string(c));
  for (const std::string& text : axioms) {
    Clause c = parse_clause_text(text, out.clauses.size());
    if (!present.insert(to_string(c)).second) continue;
    out.clauses.push_back(std::move(c));
  }
  finalize_matrix(out);
  return out;
}

} // namespace tabcop
