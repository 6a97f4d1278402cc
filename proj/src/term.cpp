#include "tabcop/term.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "tabcop/hash.hpp"

namespace tabcop {

struct Term::Node {
  bool is_var = false;
  VarId var = 0;
  std::string symbol;
  std::vector<Term> args;
  bool ground = true;
  std::size_t size = 1;
  std::size_t depth = 1;
  std::uint64_t hash = 0;
};

Term Term::var(VarId id) {
  auto n = std::make_shared<Node>();
  n->is_var = true;
  n->var = id;
  n->ground = false;
  n->hash = hash_mix(fnv1a("$var"), id);
  return Term(std::move(n));
}

Term Term::app(std::string symbol, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->hash = fnv1a(symbol);
  n->symbol = std::move(symbol);
  std::size_t max_child_depth = 0;
  for (const Term& a : args) {
    n->ground = n->ground && a.is_ground();
    n->size += a.size();
    max_child_depth = std::max(max_child_depth, a.depth());
    n->hash = hash_mix(n->hash, a.structural_hash());
  }
  n->depth = 1 + max_child_depth;
  n->args = std::move(args);
  return Term(std::move(n));
}

bool Term::is_var() const noexcept { return node_->is_var; }

VarId Term::var_id() const {
  if (!node_->is_var) throw std::logic_error("var_id() on a non-variable term");
  return node_->var;
}

const std::string& Term::symbol() const {
  if (node_->is_var) throw std::logic_error("symbol() on a variable");
  return node_->symbol;
}

const std::vector<Term>& Term::args() const { return node_->args; }
bool Term::is_ground() const noexcept { return node_->ground; }
std::size_t Term::size() const noexcept { return node_->size; }
std::size_t Term::depth() const noexcept { return node_->depth; }
std::uint64_t Term::structural_hash() const noexcept { return node_->hash; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.hash != y.hash || x.is_var != y.is_var || x.size != y.size) return false;
  if (x.is_var) return x.var == y.var;
  if (x.symbol != y.symbol || x.args.size() != y.args.size()) return false;
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (!(x.args[i] == y.args[i])) return false;
  }
  return true;
}

bool term_less(const Term& a, const Term& b) {
  if (a.is_var() != b.is_var()) return a.is_var();
  if (a.is_var()) return a.var_id() < b.var_id();
  if (a.symbol() != b.symbol()) return a.symbol() < b.symbol();
  if (a.arity() != b.arity()) return a.arity() < b.arity();
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (a.args()[i] == b.args()[i]) continue;
    return term_less(a.args()[i], b.args()[i]);
  }
  return false;
}

Literal neg_lit(const Literal& lit) { return Literal{!lit.positive, lit.atom}; }

// ---------------------------------------------------------------------------
// Substitution

Substitution::Substitution(Map bindings) : bindings_(std::move(bindings)) {}

const Term* Substitution::lookup(VarId v) const {
  auto it = bindings_.find(v);
  return it == bindings_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
  if (bindings_.empty() || t.is_ground()) return t;
  if (t.is_var()) {
    const Term* b = lookup(t.var_id());
    return b ? *b : t;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back(apply(a));
    changed = changed || !args.back().same_node(a);
  }
  if (!changed) return t;
  return Term::app(t.symbol(), std::move(args));
}

Literal Substitution::apply(const Literal& l) const { return Literal{l.positive, apply(l.atom)}; }

std::vector<Literal> Substitution::apply(std::span<const Literal> ls) const {
  std::vector<Literal> out;
  out.reserve(ls.size());
  for (const auto& l : ls) out.push_back(apply(l));
  return out;
}

Clause Substitution::apply(const Clause& c) const {
  Clause out = c;
  out.literals = apply(std::span<const Literal>(c.literals));
  return out;
}

Substitution Substitution::then(const Substitution& next) const {
  Map out;
  for (const auto& [v, t] : bindings_) {
    Term applied = next.apply(t);
    if (applied.is_var() && applied.var_id() == v) continue;
    out.emplace(v, std::move(applied));
  }
  for (const auto& [v, t] : next.bindings_) {
    out.emplace(v, t); // no-op when v is already bound by this
  }
  return Substitution(std::move(out));
}

// ---------------------------------------------------------------------------
// Unification

namespace {

using Triangular = std::unordered_map<VarId, Term>;

Term walk(Term t, const Triangular& bind) {
  while (t.is_var()) {
    auto it = bind.find(t.var_id());
    if (it == bind.end()) break;
    t = it->second;
  }
  return t;
}

bool occurs_walk(VarId v, const Term& t0, const Triangular& bind) {
  Term t = walk(t0, bind);
  if (t.is_var()) return t.var_id() == v;
  if (t.is_ground()) return false;
  for (const Term& a : t.args()) {
    if (occurs_walk(v, a, bind)) return true;
  }
  return false;
}

Term resolve(const Term& t0, const Triangular& bind) {
  Term t = walk(t0, bind);
  if (t.is_var() || t.is_ground()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back(resolve(a, bind));
    changed = changed || !args.back().same_node(a);
  }
  if (!changed) return t;
  return Term::app(t.symbol(), std::move(args));
}

Substitution normalize(const Triangular& bind) {
  Substitution::Map out;
  for (const auto& [v, t] : bind) {
    Term r = resolve(t, bind);
    if (r.is_var() && r.var_id() == v) continue;
    out.emplace(v, std::move(r));
  }
  return Substitution(std::move(out));
}

} // namespace

std::optional<Substitution> unify(const Term& a, const Term& b, const Substitution& under) {
  Triangular bind(under.bindings().begin(), under.bindings().end());
  std::vector<std::pair<Term, Term>> todo{{a, b}};
  bool extended = false;
  while (!todo.empty()) {
    auto [l0, r0] = std::move(todo.back());
    todo.pop_back();
    Term l = walk(l0, bind);
    Term r = walk(r0, bind);
    if (l.same_node(r)) continue;
    if (l.is_var() && r.is_var() && l.var_id() == r.var_id()) continue;
    if (!l.is_var() && r.is_var()) std::swap(l, r);
    if (l.is_var()) {
      if (occurs_walk(l.var_id(), r, bind)) return std::nullopt;
      bind.emplace(l.var_id(), r);
      extended = true;
      continue;
    }
    if (l.symbol() != r.symbol() || l.arity() != r.arity()) return std::nullopt;
    if (l.is_ground() && r.is_ground()) {
      if (l == r) continue;
      return std::nullopt;
    }
    for (std::size_t i = l.arity(); i-- > 0;) todo.emplace_back(l.args()[i], r.args()[i]);
  }
  if (!extended) return under;
  return normalize(bind);
}

std::optional<Substitution> unify(const Literal& a, const Literal& b, const Substitution& under) {
  return unify(a.atom, b.atom, under);
}

std::optional<Substitution> match(const Term& pattern, const Term& target,
                                  const std::function<bool(VarId)>& bindable,
                                  const Substitution& under) {
  Substitution::Map bind = under.bindings();
  std::vector<std::pair<Term, Term>> todo{{pattern, target}};
  while (!todo.empty()) {
    auto [p, t] = std::move(todo.back());
    todo.pop_back();
    if (p.is_var()) {
      const VarId v = p.var_id();
      if (!bindable(v)) {
        if (t.is_var() && t.var_id() == v) continue;
        return std::nullopt;
      }
      auto it = bind.find(v);
      if (it == bind.end()) {
        bind.emplace(v, t);
      } else if (!(it->second == t)) {
        return std::nullopt;
      }
      continue;
    }
    if (t.is_var() || p.symbol() != t.symbol() || p.arity() != t.arity()) return std::nullopt;
    for (std::size_t i = p.arity(); i-- > 0;) todo.emplace_back(p.args()[i], t.args()[i]);
  }
  return Substitution(std::move(bind));
}

bool occurs_in(VarId v, const Term& t) {
  if (t.is_var()) return t.var_id() == v;
  if (t.is_ground()) return false;
  return std::any_of(t.args().begin(), t.args().end(),
                     [v](const Term& a) { return occurs_in(v, a); });
}

void collect_vars(const Term& t, std::vector<VarId>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.var_id()) == out.end()) out.push_back(t.var_id());
    return;
  }
  if (t.is_ground()) return;
  for (const Term& a : t.args()) collect_vars(a, out);
}

std::vector<VarId> vars_of(std::span<const Literal> lits) {
  std::vector<VarId> out;
  for (const auto& l : lits) collect_vars(l.atom, out);
  return out;
}

Term shift_vars(const Term& t, VarId offset) {
  if (offset == 0 || t.is_ground()) return t;
  if (t.is_var()) return Term::var(t.var_id() + offset);
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(shift_vars(a, offset));
  return Term::app(t.symbol(), std::move(args));
}

Literal shift_vars(const Literal& l, VarId offset) {
  return Literal{l.positive, shift_vars(l.atom, offset)};
}

TermStats term_stats(std::span<const Literal> goals) {
  TermStats s;
  for (const auto& g : goals) {
    const std::size_t size = g.atom.size();
    s.total_size += size;
    s.max_size = std::max(s.max_size, size);
    s.max_depth = std::max(s.max_depth, g.atom.depth());
    std::vector<Term> stack{g.atom};
    while (!stack.empty()) {
      Term t = std::move(stack.back());
      stack.pop_back();
      if (t.is_var()) continue;
      ++s.symbol_count;
      for (const Term& a : t.args()) stack.push_back(a);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Positions

namespace {

void positions_rec(const Term& t, Position& cur, std::vector<Position>& out) {
  out.push_back(cur);
  if (t.is_var()) return;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    cur.push_back(i + 1);
    positions_rec(t.args()[i], cur, out);
    cur.pop_back();
  }
}

Term replace_rec(const Term& t, const Position& p, std::size_t k, const Term& u) {
  if (k == p.size()) return u;
  const std::size_t i = p[k];
  if (t.is_var() || i == 0 || i > t.arity()) throw std::out_of_range("invalid term position");
  std::vector<Term> args = t.args();
  args[i - 1] = replace_rec(args[i - 1], p, k + 1, u);
  return Term::app(t.symbol(), std::move(args));
}

} // namespace

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  positions_rec(t, cur, out);
  return out;
}

const Term& subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::size_t i : p) {
    if (cur->is_var() || i == 0 || i > cur->arity()) {
      throw std::out_of_range("invalid term position");
    }
    cur = &cur->args()[i - 1];
  }
  return *cur;
}

Term replace_at(const Term& t, const Position& p, const Term& u) { return replace_rec(t, p, 0, u); }

// ---------------------------------------------------------------------------
// Depth-bounded hashing

std::uint64_t term_hash(const Term& t, std::size_t depth) {
  if (t.is_var()) return fnv1a("?");
  std::uint64_t h = fnv1a(t.symbol());
  if (depth == 0) return h;
  h = hash_mix(h, t.arity());
  for (const Term& a : t.args()) h = hash_mix(h, term_hash(a, depth - 1));
  return h;
}

std::uint64_t literal_hash(const Literal& l, std::size_t depth) {
  return hash_mix(l.positive ? 1 : 2, term_hash(l.atom, depth));
}

// ---------------------------------------------------------------------------
// Printing

std::string default_var_name(VarId v) { return "_V" + std::to_string(v); }

namespace {

void print_term(std::string& out, const Term& t, const VarNamer& namer) {
  if (t.is_var()) {
    out += namer(t.var_id());
    return;
  }
  if (t.symbol() == "=" && t.arity() == 2) {
    print_term(out, t.args()[0], namer);
    out += " = ";
    print_term(out, t.args()[1], namer);
    return;
  }
  out += t.symbol();
  if (t.arity() == 0) return;
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    print_term(out, t.args()[i], namer);
  }
  out += ')';
}

} // namespace

std::string to_string(const Term& t, const VarNamer& namer) {
  std::string out;
  print_term(out, t, namer);
  return out;
}

std::string to_string(const Literal& l, const VarNamer& namer) {
  std::string out;
  if (l.is_equality() && !l.positive) {
    print_term(out, l.args()[0], namer);
    out += " != ";
    print_term(out, l.args()[1], namer);
    return out;
  }
  if (!l.positive) out += '-';
  print_term(out, l.atom, namer);
  return out;
}

std::string to_string(const Clause& c) {
  VarNamer namer = [&c](VarId v) {
    return v < c.var_names.size() ? c.var_names[v] : default_var_name(v);
  };
  std::string out;
  for (std::size_t i = 0; i < c.literals.size(); ++i) {
    if (i) out += " | ";
    out += to_string(c.literals[i], namer);
  }
  out += '.';
  return out;
}

} // namespace tabcop
