#pragma once

// First-order terms, literals and clauses with value semantics.
//
// Terms are immutable trees shared through reference counting, so copying a
// term (and therefore a whole prover state) is cheap. Atoms are represented as
// application terms whose root symbol is the predicate symbol.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tabcop {

using VarId = std::uint32_t;

class Term {
public:
  static Term var(VarId id);
  static Term app(std::string symbol, std::vector<Term> args = {});

  bool is_var() const noexcept;
  VarId var_id() const;
  const std::string& symbol() const;
  const std::vector<Term>& args() const;
  std::size_t arity() const { return args().size(); }

  bool is_ground() const noexcept;
  // Number of symbol and variable occurrences.
  std::size_t size() const noexcept;
  // Depth of a constant or variable is 1.
  std::size_t depth() const noexcept;
  // Full structural hash (not depth-bounded); variables keep their identity.
  std::uint64_t structural_hash() const noexcept;

  bool same_node(const Term& other) const noexcept { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Total order used for deterministic containers; not semantically meaningful.
bool term_less(const Term& a, const Term& b);

struct Literal {
  bool positive = true;
  Term atom = Term::app("#");

  const std::string& predicate() const { return atom.symbol(); }
  const std::vector<Term>& args() const { return atom.args(); }
  bool is_equality() const { return atom.symbol() == "=" && atom.arity() == 2; }

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.positive == b.positive && a.atom == b.atom;
  }
  friend bool operator!=(const Literal& a, const Literal& b) { return !(a == b); }
};

Literal neg_lit(const Literal& lit);

struct Clause {
  std::size_t id = 0;
  std::vector<Literal> literals;
  // Variables of a matrix clause are numbered 0..n-1; names are for printing.
  std::vector<std::string> var_names;

  std::size_t var_count() const { return var_names.size(); }
};

// Variable to term bindings. Kept normalized: no bound variable occurs in the
// range, so applying once is the same as applying twice.
class Substitution {
public:
  using Map = std::map<VarId, Term>;

  Substitution() = default;
  explicit Substitution(Map bindings);

  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const Map& bindings() const { return bindings_; }
  const Term* lookup(VarId v) const;

  Term apply(const Term& t) const;
  Literal apply(const Literal& l) const;
  std::vector<Literal> apply(std::span<const Literal> ls) const;
  Clause apply(const Clause& c) const;

  // Returns this followed by `next`: applying the result equals applying this
  // and then `next`. Both inputs must be normalized.
  Substitution then(const Substitution& next) const;

  friend bool operator==(const Substitution& a, const Substitution& b) {
    return a.bindings_ == b.bindings_;
  }

private:
  Map bindings_;
};

// Most general unifier with occurs check, extending `under`.
std::optional<Substitution> unify(const Term& a, const Term& b,
                                  const Substitution& under = {});
// Unifies the atoms; the caller is responsible for polarity requirements.
std::optional<Substitution> unify(const Literal& a, const Literal& b,
                                  const Substitution& under = {});

// One-sided matching: finds σ with σ(pattern) == target, binding only
// variables for which `bindable` holds. Target variables are treated as
// constants.
std::optional<Substitution> match(const Term& pattern, const Term& target,
                                  const std::function<bool(VarId)>& bindable,
                                  const Substitution& under = {});

bool occurs_in(VarId v, const Term& t);
void collect_vars(const Term& t, std::vector<VarId>& out);
std::vector<VarId> vars_of(std::span<const Literal> lits);

// Renames variable v to v + offset.
Term shift_vars(const Term& t, VarId offset);
Literal shift_vars(const Literal& l, VarId offset);

struct TermStats {
  std::size_t total_size = 0;
  std::size_t max_size = 0;
  std::size_t max_depth = 0;
  std::size_t symbol_count = 0;

  friend bool operator==(const TermStats&, const TermStats&) = default;
};

// Sizes and depths include the predicate symbol of each literal.
TermStats term_stats(std::span<const Literal> goals);

// 1-based argument indices from the root.
using Position = std::vector<std::size_t>;

// All positions of t, leftmost-outermost (root first, then depth-first).
std::vector<Position> positions(const Term& t);
const Term& subterm_at(const Term& t, const Position& p);
// Throws std::out_of_range for an invalid position.
Term replace_at(const Term& t, const Position& p, const Term& u);

// Depth-bounded structural hash. Depth 0 hashes the root symbol only and all
// variables share one token, so alpha-variants hash equally.
std::uint64_t term_hash(const Term& t, std::size_t depth);
std::uint64_t literal_hash(const Literal& l, std::size_t depth);

// Printing in the problem grammar. Variables print through `namer`; the
// default names variable v as `_V<v>`.
using VarNamer = std::function<std::string(VarId)>;
std::string default_var_name(VarId v);
std::string to_string(const Term& t, const VarNamer& namer = default_var_name);
std::string to_string(const Literal& l, const VarNamer& namer = default_var_name);
std::string to_string(const Clause& c);

} // namespace tabcop
