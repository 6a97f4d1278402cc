#pragma once

// Independent proof checker. A proof trace is accepted when every proof
// clause is an instance of the input clause it names and the ground proof
// clauses, polarity swapped and extended with equality instances for the
// rewrite steps, are propositionally unsatisfiable.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabcop/problem.hpp"
#include "tabcop/term.hpp"

namespace tabcop::check {

// Clause variable name -> term.
using Theta = std::map<std::string, Term>;

struct Step {
  enum class Kind { start, ext, red, lem, rew };
  Kind kind = Kind::start;
  std::size_t line = 0;
  std::size_t clause_id = 0;
  Theta theta;
  Literal goal;       // ext, red, lem
  Literal path_lit;   // red
  Literal equation;   // rew
  bool right_to_left = false;
  Literal before;     // rew
  Literal after;      // rew
  std::vector<Literal> sides;
};

// Throws ParseError. Variables are shared across the whole proof.
std::vector<Step> parse_proof(std::string_view text);

// Replaces every variable by the constant `_sk<id>`; ids follow first
// occurrence in the proof text.
Term freeze(const Term& t);
Literal freeze(const Literal& l);

// Checks that theta(rho(C)) is contained in B for some renaming rho of C's
// variables onto theta's domain, trying the identity first.
bool check_instance(const std::vector<Literal>& B, const Theta& theta, const Clause& C);

// Propositional clauses over variables 1..n, literals are +v / -v.
struct GroundClauseSet {
  std::vector<std::vector<int>> clauses;
  std::vector<std::string> atoms; // atoms[v-1]
  std::map<std::string, int> ids;

  int atom(const Term& ground_atom);
  // Adds the clause with every literal's polarity swapped when `swap`.
  void add(const std::vector<Literal>& lits, bool swap);
};

// DPLL with unit propagation and pure literals; returns a model (index v-1)
// if satisfiable.
std::optional<std::vector<bool>> solve(const std::vector<std::vector<int>>& clauses,
                                       std::size_t num_vars);

// Ground equality instances justifying one rewrite: congruence through every
// layer between the rewritten position and the literal, and symmetry for every
// equation involved. Throws std::invalid_argument for a malformed step.
std::vector<std::vector<Literal>> rewrite_instances(const Literal& equation, bool right_to_left,
                                                    const Literal& before, const Literal& after);

struct Verdict {
  bool ok = false;
  std::string message;
  std::optional<std::size_t> step; // 0-based index of the failing step
  std::vector<std::pair<std::string, bool>> witness;
};

Verdict check_proof(const std::vector<Step>& steps, const Matrix& m);
// Parse errors become a failed verdict.
Verdict check_proof_text(std::string_view proof, const Matrix& m);

} // namespace tabcop::check
