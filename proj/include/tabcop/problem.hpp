#pragma once

// Problem files: clause matrices in disjunctive normal form.
//
//   problem  := { clause | comment | blank }
//   clause   := literal { "|" literal } "."
//   literal  := [ "-" ] atom | term "!=" term
//   atom     := ident [ "(" term { "," term } ")" ] | term "=" term
//   comment  := "%" rest-of-line
//
// Identifiers starting with an uppercase letter or '_' are variables, scoped
// per clause. `#` is the reserved nullary start marker.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tabcop/term.hpp"

namespace tabcop {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class ArityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class SymbolKind { function, predicate };

struct SymbolInfo {
  std::size_t arity = 0;
  SymbolKind kind = SymbolKind::function;
  friend bool operator==(const SymbolInfo&, const SymbolInfo&) = default;
};

struct Matrix {
  std::vector<Clause> clauses;
  std::vector<std::size_t> start_ids;
  std::map<std::string, SymbolInfo> symbols;

  bool has_equality() const { return symbols.count("=") != 0; }
};

// Maps variable names to ids within one scope (one clause, one proof line).
class VarScope {
public:
  VarId id_for(const std::string& name);
  const std::vector<std::string>& names() const { return names_; }

private:
  std::map<std::string, VarId> ids_;
  std::vector<std::string> names_;
};

// Token-level reader shared by the problem parser and the proof-trace parser.
class SyntaxReader {
public:
  explicit SyntaxReader(std::string_view text, std::size_t first_line = 1);

  bool at_end();
  // Next significant character, or '\0' at end.
  char peek();
  bool try_consume(std::string_view token);
  void expect(std::string_view token);
  std::string read_word();
  std::string read_ident();
  std::size_t read_index();

  Term read_term(VarScope& scope);
  Literal read_literal(VarScope& scope);

  [[noreturn]] void fail(const std::string& msg) const;
  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }

private:
  void skip_space();
  static bool is_ident_char(char c);

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t col_ = 1;
};

bool is_variable_name(std::string_view name);

Matrix parse_problem(std::string_view text);
Matrix load_problem(const std::string& path);
std::string print_problem(const Matrix& m);

// Recomputes start clauses and the symbol table after clauses change.
void finalize_matrix(Matrix& m);

// Appends reflexivity, symmetry, transitivity and argument-wise congruence
// clauses for every function and predicate symbol. Idempotent; no-op when the
// matrix does not use `=`.
Matrix generate_equality_axioms(const Matrix& m);

} // namespace tabcop
