#include "tabcop/checker.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace tabcop::check {

namespace {

bool same_shape(const Literal& a, const Literal& b) {
  return a.positive == b.positive && a.atom.symbol() == b.atom.symbol() &&
         a.atom.arity() == b.atom.arity();
}

Literal negate(const Literal& l) { return Literal{!l.positive, l.atom}; }

Literal eq_lit(bool positive, const Term& x, const Term& y) {
  return Literal{positive, Term::app("=", {x, y})};
}

Term substitute(const Term& t, const std::vector<const Term*>& values) {
  if (t.is_var()) return *values.at(t.var_id());
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(substitute(a, values));
  return Term::app(t.symbol(), std::move(args));
}

// Backtracking search for an injective rho from clause variables onto the
// domain of theta.
class RenamingSearch {
public:
  RenamingSearch(const Theta& theta, const Clause& c) : clause_(c), rho_(c.var_count(), -1) {
    for (const auto& [name, value] : theta) {
      names_.push_back(name);
      values_.push_back(&value);
    }
    used_.assign(names_.size(), 0);
  }

  // Identity renaming, if every clause variable is in the domain.
  std::optional<std::vector<Literal>> identity() const {
    std::vector<const Term*> vals;
    for (const std::string& n : clause_.var_names) {
      auto it = std::find(names_.begin(), names_.end(), n);
      if (it == names_.end()) return std::nullopt;
      vals.push_back(values_[static_cast<std::size_t>(it - names_.begin())]);
    }
    return apply(vals);
  }

  // Every literal of C maps into B.
  bool contained_in(const std::vector<Literal>& B) {
    return literals_from(0, B, [] { return true; });
  }

  // Some literal of C maps onto `required`; remaining variables take the
  // first free domain names.
  std::optional<std::vector<Literal>> containing(const Literal* required) {
    std::optional<std::vector<Literal>> out;
    auto complete = [&] {
      std::vector<int> saved = rho_;
      std::vector<char> saved_used = used_;
      std::size_t next = 0;
      for (int& r : rho_) {
        if (r >= 0) continue;
        while (next < used_.size() && used_[next]) ++next;
        if (next == used_.size()) {
          rho_ = saved;
          used_ = saved_used;
          return false;
        }
        r = static_cast<int>(next);
        used_[next] = 1;
      }
      std::vector<const Term*> vals;
      for (int r : rho_) vals.push_back(values_[static_cast<std::size_t>(r)]);
      out = apply(vals);
      rho_ = saved;
      used_ = saved_used;
      return true;
    };
    if (!required) {
      complete();
      return out;
    }
    for (const Literal& l : clause_.literals) {
      if (!same_shape(l, *required)) continue;
      if (match(l.atom, required->atom, complete)) return out;
    }
    return std::nullopt;
  }

private:
  std::vector<Literal> apply(const std::vector<const Term*>& vals) const {
    std::vector<Literal> out;
    for (const Literal& l : clause_.literals) out.push_back(Literal{l.positive, substitute(l.atom, vals)});
    return out;
  }

  bool literals_from(std::size_t j, const std::vector<Literal>& B,
                     const std::function<bool()>& done) {
    if (j == clause_.literals.size()) return done();
    const Literal& l = clause_.literals[j];
    for (const Literal& b : B) {
      if (!same_shape(l, b)) continue;
      if (match(l.atom, b.atom, [&] { return literals_from(j + 1, B, done); })) return true;
    }
    return false;
  }

  bool match(const Term& p, const Term& t, const std::function<bool()>& k) {
    if (p.is_var()) {
      const VarId v = p.var_id();
      if (rho_[v] >= 0) return *values_[static_cast<std::size_t>(rho_[v])] == t && k();
      for (std::size_t d = 0; d < names_.size(); ++d) {
        if (used_[d] || !(*values_[d] == t)) continue;
        rho_[v] = static_cast<int>(d);
        used_[d] = 1;
        if (k()) return true;
        rho_[v] = -1;
        used_[d] = 0;
      }
      return false;
    }
    if (t.is_var() || p.symbol() != t.symbol() || p.arity() != t.arity()) return false;
    return match_args(p, t, 0, k);
  }

  bool match_args(const Term& p, const Term& t, std::size_t i, const std::function<bool()>& k) {
    if (i == p.arity()) return k();
    return match(p.args()[i], t.args()[i], [&] { return match_args(p, t, i + 1, k); });
  }

  const Clause& clause_;
  std::vector<std::string> names_;
  std::vector<const Term*> values_;
  std::vector<int> rho_;
  std::vector<char> used_;
};

Theta read_theta(SyntaxReader& r, VarScope& scope) {
  Theta theta;
  r.expect("{");
  if (r.try_consume("}")) return theta;
  do {
    const std::string name = r.read_ident();
    r.expect("=");
    Term value = r.read_term(scope);
    if (!theta.emplace(name, std::move(value)).second) r.fail("variable '" + name + "' bound twice");
  } while (r.try_consume(","));
  r.expect("}");
  return theta;
}

} // namespace

std::vector<Step> parse_proof(std::string_view text) {
  std::vector<Step> steps;
  VarScope scope;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    SyntaxReader r(line, line_no);
    if (r.at_end()) continue;
    Step s;
    s.line = line_no;
    const std::string kw = r.read_word();
    if (kw == "start" || kw == "ext" || kw == "rew") {
      s.kind = kw == "start" ? Step::Kind::start : kw == "ext" ? Step::Kind::ext : Step::Kind::rew;
      s.clause_id = r.read_index();
      s.theta = read_theta(r, scope);
      if (s.kind == Step::Kind::ext) s.goal = r.read_literal(scope);
      if (s.kind == Step::Kind::rew) {
        s.equation = r.read_literal(scope);
        const std::string dir = r.read_word();
        if (dir != "LR" && dir != "RL") r.fail("expected LR or RL");
        s.right_to_left = dir == "RL";
        s.before = r.read_literal(scope);
        s.after = r.read_literal(scope);
        while (!r.at_end()) s.sides.push_back(r.read_literal(scope));
      }
    } else if (kw == "red") {
      s.kind = Step::Kind::red;
      s.goal = r.read_literal(scope);
      s.path_lit = r.read_literal(scope);
    } else if (kw == "lem") {
      s.kind = Step::Kind::lem;
      s.goal = r.read_literal(scope);
    } else {
      r.fail("unknown proof step '" + kw + "'");
    }
    if (!r.at_end()) r.fail("unexpected text after proof step");
    steps.push_back(std::move(s));
  }
  return steps;
}

Term freeze(const Term& t) {
  if (t.is_var()) return Term::app("_sk" + std::to_string(t.var_id()), {});
  if (t.is_ground()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(freeze(a));
  return Term::app(t.symbol(), std::move(args));
}

Literal freeze(const Literal& l) { return Literal{l.positive, freeze(l.atom)}; }

bool check_instance(const std::vector<Literal>& B, const Theta& theta, const Clause& C) {
  RenamingSearch search(theta, C);
  if (auto inst = search.identity()) {
    const bool all = std::all_of(inst->begin(), inst->end(), [&](const Literal& l) {
      return std::find(B.begin(), B.end(), l) != B.end();
    });
    if (all) return true;
  }
  return search.contained_in(B);
}

int GroundClauseSet::atom(const Term& a) {
  const std::string key = to_string(a);
  auto [it, fresh] = ids.emplace(key, static_cast<int>(atoms.size()) + 1);
  if (fresh) atoms.push_back(key);
  return it->second;
}

void GroundClauseSet::add(const std::vector<Literal>& lits, bool swap) {
  std::vector<int> c;
  for (const Literal& l : lits) {
    const int v = atom(l.atom);
    c.push_back((l.positive != swap) ? v : -v);
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  clauses.push_back(std::move(c));
}

std::optional<std::vector<bool>> solve(const std::vector<std::vector<int>>& clauses,
                                       std::size_t num_vars) {
  // 0 unassigned, 1 true, -1 false
  std::vector<int> val(num_vars + 1, 0);
  auto lit_value = [&](int l) {
    const int v = val[static_cast<std::size_t>(std::abs(l))];
    return l > 0 ? v : -v;
  };

  std::function<bool()> dpll = [&]() -> bool {
    std::vector<int> trail;
    auto undo = [&] {
      for (int v : trail) val[static_cast<std::size_t>(v)] = 0;
    };
    // unit propagation and pure literals to fixpoint
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& c : clauses) {
        int unassigned = 0, last = 0;
        bool sat = false;
        for (int l : c) {
          const int lv = lit_value(l);
          if (lv > 0) {
            sat = true;
            break;
          }
          if (lv == 0) {
            ++unassigned;
            last = l;
          }
        }
        if (sat) continue;
        if (unassigned == 0) {
          undo();
          return false;
        }
        if (unassigned == 1) {
          val[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
          trail.push_back(std::abs(last));
          changed = true;
        }
      }
      if (changed) continue;
      std::vector<char> pos(num_vars + 1), neg(num_vars + 1);
      for (const auto& c : clauses) {
        if (std::any_of(c.begin(), c.end(), [&](int l) { return lit_value(l) > 0; })) continue;
        for (int l : c) {
          if (lit_value(l) != 0) continue;
          (l > 0 ? pos : neg)[static_cast<std::size_t>(std::abs(l))] = 1;
        }
      }
      for (std::size_t v = 1; v <= num_vars; ++v) {
        if (val[v] != 0 || pos[v] == neg[v]) continue;
        val[v] = pos[v] ? 1 : -1;
        trail.push_back(static_cast<int>(v));
        changed = true;
      }
    }
    // most frequent literal in the open clauses
    std::vector<int> count(2 * num_vars + 2, 0);
    bool open = false;
    for (const auto& c : clauses) {
      if (std::any_of(c.begin(), c.end(), [&](int l) { return lit_value(l) > 0; })) continue;
      open = true;
      for (int l : c) {
        if (lit_value(l) == 0) ++count[static_cast<std::size_t>(2 * std::abs(l) + (l < 0))];
      }
    }
    if (!open) return true;
    std::size_t best = 0;
    for (std::size_t i = 2; i < count.size(); ++i) {
      if (count[i] > count[best]) best = i;
    }
    const std::size_t v = best / 2;
    const int first = best % 2 ? -1 : 1;
    for (int choice : {first, -first}) {
      val[v] = choice;
      if (dpll()) return true;
      val[v] = 0;
    }
    undo();
    return false;
  };

  if (!dpll()) return std::nullopt;
  std::vector<bool> model(num_vars);
  for (std::size_t v = 1; v <= num_vars; ++v) model[v - 1] = val[v] > 0;
  return model;
}

std::vector<std::vector<Literal>> rewrite_instances(const Literal& equation, bool right_to_left,
                                                    const Literal& before, const Literal& after) {
  if (equation.positive || equation.atom.symbol() != "=" || equation.atom.arity() != 2) {
    throw std::invalid_argument("rewrite equation must be a negated equality");
  }
  const Term& l = equation.atom.args()[0];
  const Term& r = equation.atom.args()[1];
  const Term& lhs = right_to_left ? r : l;
  const Term& rhs = right_to_left ? l : r;
  if (!same_shape(before, after)) {
    throw std::invalid_argument("goal before and after rewriting differ in predicate or sign");
  }

  // (term before, term after, index of the one differing argument)
  struct Layer {
    Term b, a;
    std::size_t i;
  };
  std::vector<Layer> layers;
  Term tb = before.atom, ta = after.atom;
  while (true) {
    if (!layers.empty() && tb == lhs && ta == rhs) break;
    if (tb.is_var() || ta.is_var() || tb.symbol() != ta.symbol() || tb.arity() != ta.arity()) {
      throw std::invalid_argument("goals are not related by one rewrite");
    }
    std::size_t diff = tb.arity();
    for (std::size_t i = 0; i < tb.arity(); ++i) {
      if (tb.args()[i] == ta.args()[i]) continue;
      if (diff != tb.arity()) throw std::invalid_argument("goals differ at more than one position");
      diff = i;
    }
    if (diff == tb.arity()) throw std::invalid_argument("rewrite leaves the goal unchanged");
    layers.push_back(Layer{tb, ta, diff});
    const Term nb = tb.args()[diff], na = ta.args()[diff];
    tb = nb;
    ta = na;
  }

  std::vector<std::vector<Literal>> out;
  std::set<std::pair<std::string, std::string>> pairs;
  auto note = [&](const Term& x, const Term& y) { pairs.emplace(to_string(x), to_string(y)); };
  std::vector<std::pair<Term, Term>> eqs{{l, r}};
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const Layer& L = layers[k];
    const Term& xb = L.b.args()[L.i];
    const Term& xa = L.a.args()[L.i];
    eqs.emplace_back(xb, xa);
    if (k == 0) {
      out.push_back({eq_lit(false, xb, xa), Literal{false, L.b}, Literal{true, L.a}});
      out.push_back({eq_lit(false, xa, xb), Literal{false, L.a}, Literal{true, L.b}});
    } else {
      eqs.emplace_back(L.b, L.a);
      out.push_back({eq_lit(false, xb, xa), eq_lit(true, L.b, L.a)});
      out.push_back({eq_lit(false, xa, xb), eq_lit(true, L.a, L.b)});
    }
  }
  for (const auto& [x, y] : eqs) {
    if (!pairs.emplace(to_string(x), to_string(y)).second) continue;
    note(y, x);
    out.push_back({eq_lit(false, x, y), eq_lit(true, y, x)});
    out.push_back({eq_lit(false, y, x), eq_lit(true, x, y)});
  }
  return out;
}

Verdict check_proof(const std::vector<Step>& steps, const Matrix& m) {
  Verdict v;
  auto fail = [&](std::size_t i, std::string msg) {
    v.ok = false;
    v.step = i;
    v.message = "assertion 1 failed at step " + std::to_string(i) + " (line " +
                std::to_string(steps[i].line) + "): " + msg;
    return v;
  };
  if (steps.empty()) {
    v.message = "empty proof";
    return v;
  }
  if (steps.front().kind != Step::Kind::start) {
    v.message = "proof does not begin with a start step";
    v.step = 0;
    return v;
  }

  GroundClauseSet ground;
  bool uses_marker = false;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Step& s = steps[i];
    if (i > 0 && s.kind == Step::Kind::start) return fail(i, "second start step");
    if (s.kind == Step::Kind::start || s.kind == Step::Kind::ext || s.kind == Step::Kind::rew) {
      if (s.clause_id >= m.clauses.size()) return fail(i, "no input clause " + std::to_string(s.clause_id));
    }
    Theta theta;
    for (const auto& [name, value] : s.theta) theta.emplace(name, freeze(value));

    std::vector<Literal> clause;
    switch (s.kind) {
    case Step::Kind::start: {
      const auto& ids = m.start_ids;
      if (std::find(ids.begin(), ids.end(), s.clause_id) == ids.end()) {
        return fail(i, "clause " + std::to_string(s.clause_id) + " is not a start clause");
      }
      auto inst = RenamingSearch(theta, m.clauses[s.clause_id]).identity();
      if (!inst) inst = RenamingSearch(theta, m.clauses[s.clause_id]).containing(nullptr);
      if (!inst) return fail(i, "substitution does not cover the clause variables");
      clause = *inst;
      break;
    }
    case Step::Kind::ext: {
      const Literal want = negate(freeze(s.goal));
      RenamingSearch search(theta, m.clauses[s.clause_id]);
      auto inst = search.identity();
      if (!inst || std::find(inst->begin(), inst->end(), want) == inst->end()) {
        inst = search.containing(&want);
      }
      if (!inst) {
        return fail(i, "no instance of clause " + std::to_string(s.clause_id) + " contains " +
                           to_string(want));
      }
      clause = *inst;
      break;
    }
    case Step::Kind::rew: {
      clause.push_back(freeze(s.equation));
      for (const Literal& side : s.sides) clause.push_back(freeze(side));
      if (!check_instance(clause, theta, m.clauses[s.clause_id])) {
        return fail(i, "rewrite clause is not an instance of clause " + std::to_string(s.clause_id));
      }
      try {
        for (const auto& c :
             rewrite_instances(freeze(s.equation), s.right_to_left, freeze(s.before), freeze(s.after))) {
          ground.add(c, false);
        }
      } catch (const std::invalid_argument& e) {
        return fail(i, e.what());
      }
      break;
    }
    case Step::Kind::red:
      if (!(freeze(s.goal) == negate(freeze(s.path_lit)))) {
        return fail(i, "reduction literals are not complementary");
      }
      continue;
    case Step::Kind::lem:
      continue;
    }
    for (const Literal& l : clause) uses_marker |= l.atom.symbol() == "#" && l.atom.arity() == 0;
    ground.add(clause, true);
  }
  if (uses_marker) ground.add({Literal{true, Term::app("#", {})}}, false);

  auto model = solve(ground.clauses, ground.atoms.size());
  if (model) {
    v.ok = false;
    v.message = "assertion 2 failed: the ground proof clauses are satisfiable";
    for (std::size_t a = 0; a < ground.atoms.size(); ++a) v.witness.emplace_back(ground.atoms[a], (*model)[a]);
    return v;
  }
  v.ok = true;
  v.message = "OK";
  return v;
}

Verdict check_proof_text(std::string_view proof, const Matrix& m) {
  try {
    return check_proof(parse_proof(proof), m);
  } catch (const ParseError& e) {
    Verdict v;
    v.message = "proof parse error at line " + std::to_string(e.line()) + ": " + e.what();
    return v;
  }
}

} // namespace tabcop::check
