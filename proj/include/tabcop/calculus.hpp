#pragma once

// Connection-tableau state machine with explicit state. A state holds the open
// goals of the active branch, the active path, lemmas, the stack of sibling
// branches still to be solved, the proof so far and the variable bindings.
// Actions are applied to copies; det_steps then runs the choice-free
// simplifications to a fixpoint.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tabcop/config.hpp"
#include "tabcop/persistent.hpp"
#include "tabcop/problem.hpp"
#include "tabcop/term.hpp"

namespace tabcop {

enum class Direction { LR, RL };

struct StartAction {
  std::size_t clause_id = 0;
  friend bool operator==(const StartAction&, const StartAction&) = default;
};
struct ExtAction {
  std::size_t clause_id = 0;
  std::size_t literal_index = 0;
  friend bool operator==(const ExtAction&, const ExtAction&) = default;
};
// Index into the active path, most recent literal first.
struct RedAction {
  std::size_t path_index = 0;
  friend bool operator==(const RedAction&, const RedAction&) = default;
};
struct RewAction {
  std::size_t clause_id = 0;
  std::size_t eq_literal_index = 0;
  Direction direction = Direction::LR;
  Position position;
  friend bool operator==(const RewAction&, const RewAction&) = default;
};

using Action = std::variant<StartAction, ExtAction, RedAction, RewAction>;

std::string to_string(const Action& a);

// Proof steps keep the variable offset the clause was renamed with; the
// substitution θ is read off the final bindings when the proof is printed.
struct StartStep {
  std::size_t clause_id;
  VarId var_offset;
};
struct ExtStep {
  std::size_t clause_id;
  VarId var_offset;
  Literal goal;
};
struct RedStep {
  Literal goal;
  Literal path_literal;
};
struct LemStep {
  Literal literal;
};
struct RewStep {
  std::size_t clause_id;
  VarId var_offset;
  Literal equation;
  Direction direction;
  Literal goal_before;
  Literal goal_after;
  std::vector<Literal> side_literals;
};

using ProofStep = std::variant<StartStep, ExtStep, RedStep, LemStep, RewStep>;

enum class Result { open = 0, proved = 1, failed = -1 };

struct TodoFrame {
  std::vector<Literal> goal;
  PList<Literal> path;
  PList<Literal> lemmas;
};

struct ProverState {
  // Open goals of the active branch, bindings applied.
  std::vector<Literal> goal;
  // Path, lemmas, todos and proof may hold literals with stale bindings;
  // read them through `bindings.resolve`.
  PList<Literal> path;
  PList<Literal> lemmas;
  PList<TodoFrame> todos;
  PList<ProofStep> proof; // most recent step first
  std::vector<Action> actions;
  Result result = Result::open;
  Bindings bindings;
  VarId next_var = 0;
  std::size_t inference_count = 0;
  // True for the virtual root whose actions choose a start clause.
  bool pre_start = false;

  std::size_t proof_length() const { return proof.size(); }
  // The accumulated substitution in normalized form.
  Substitution substitution() const;
};

class ActionError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

class NoStartClauseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class Calculus {
public:
  Calculus(const Matrix& matrix, const Config& cfg);

  const Matrix& matrix() const { return matrix_; }
  const Config& config() const { return cfg_; }

  // Virtual root whose actions are the start clauses.
  ProverState root_state() const;
  // One state per start clause, det_steps applied.
  std::vector<ProverState> initial_states() const;

  std::vector<Action> valid_actions(const ProverState& s) const;
  // Returns a new state; `s` is left untouched.
  ProverState apply_action(const ProverState& s, std::size_t index) const;
  void det_steps(ProverState& s) const;

  // Proof trace lines; `s` must be proved.
  std::vector<std::string> proof_trace(const ProverState& s) const;
  std::string proof_text(const ProverState& s) const;

private:
  struct RewriteRule {
    std::size_t clause_id;
    std::size_t eq_literal_index;
    Direction direction;
    Term lhs; // clause-local variables
    Term rhs;
  };

  void apply_nondet(ProverState& s, const Action& a) const;
  void start(ProverState& s, std::size_t clause_id) const;
  std::string theta_text(const ProverState& s, std::size_t clause_id, VarId offset) const;

  Matrix matrix_;
  Config cfg_;
  // (predicate, polarity) -> (clause id, literal index)
  std::map<std::pair<std::string, bool>, std::vector<std::pair<std::size_t, std::size_t>>>
      literal_index_;
  std::vector<RewriteRule> rewrite_rules_;
};

// Stable textual dump of a state with bindings resolved.
std::string describe(const ProverState& s);

} // namespace tabcop
