#include "tabcop/calculus.hpp"

#include <algorithm>
#include <sstream>

namespace tabcop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const char* dir_name(Direction d) { return d == Direction::LR ? "LR" : "RL"; }

std::string position_text(const Position& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(p[i]);
  }
  return out + "]";
}

bool complementary_candidates(const Literal& a, const Literal& b) {
  return a.positive != b.positive && a.predicate() == b.predicate() &&
         a.atom.arity() == b.atom.arity();
}

void bind_all(Bindings& b, const Substitution& sigma) {
  for (const auto& [v, t] : sigma.bindings()) b.set(v, t);
}

bool goal_is_ground(const std::vector<Literal>& goal) {
  return std::all_of(goal.begin(), goal.end(), [](const Literal& l) { return l.atom.is_ground(); });
}

} // namespace

std::string to_string(const Action& a) {
  return std::visit(
      overloaded{
          [](const StartAction& x) { return "start(" + std::to_string(x.clause_id) + ")"; },
          [](const ExtAction& x) {
            return "ext(" + std::to_string(x.clause_id) + "," + std::to_string(x.literal_index) +
                   ")";
          },
          [](const RedAction& x) { return "red(" + std::to_string(x.path_index) + ")"; },
          [](const RewAction& x) {
            return "rew(" + std::to_string(x.clause_id) + "," +
                   std::to_string(x.eq_literal_index) + "," + dir_name(x.direction) + "," +
                   position_text(x.position) + ")";
          },
      },
      a);
}

Substitution ProverState::substitution() const {
  Substitution::Map out;
  for (VarId v = 0; v < next_var; ++v) {
    if (!bindings.get(v)) continue;
    Term t = bindings.resolve(Term::var(v));
    if (t.is_var() && t.var_id() == v) continue;
    out.emplace(v, std::move(t));
  }
  return Substitution(std::move(out));
}

Calculus::Calculus(const Matrix& matrix, const Config& cfg) : matrix_(matrix), cfg_(cfg) {
  for (const Clause& c : matrix_.clauses) {
    for (std::size_t j = 0; j < c.literals.size(); ++j) {
      const Literal& l = c.literals[j];
      literal_index_[{l.predicate(), l.positive}].emplace_back(c.id, j);
      if (!l.is_equality() || l.positive) continue;
      for (Direction dir : {Direction::LR, Direction::RL}) {
        const Term& lhs = l.args()[dir == Direction::LR ? 0 : 1];
        const Term& rhs = l.args()[dir == Direction::LR ? 1 : 0];
        if (lhs.is_var()) continue;
        std::vector<VarId> lhs_vars, rhs_vars;
        collect_vars(lhs, lhs_vars);
        collect_vars(rhs, rhs_vars);
        const bool closed = std::all_of(rhs_vars.begin(), rhs_vars.end(), [&](VarId v) {
          return std::find(lhs_vars.begin(), lhs_vars.end(), v) != lhs_vars.end();
        });
        if (!closed) continue;
        rewrite_rules_.push_back(RewriteRule{c.id, j, dir, lhs, rhs});
      }
    }
  }
}

ProverState Calculus::root_state() const {
  if (matrix_.start_ids.empty()) throw NoStartClauseError("problem has no start clause");
  ProverState s;
  s.pre_start = true;
  s.actions = valid_actions(s);
  return s;
}

std::vector<ProverState> Calculus::initial_states() const {
  const ProverState root = root_state();
  std::vector<ProverState> out;
  out.reserve(root.actions.size());
  for (std::size_t i = 0; i < root.actions.size(); ++i) {
    ProverState s = root;
    s.actions.clear();
    apply_nondet(s, root.actions[i]);
    det_steps(s);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Action> Calculus::valid_actions(const ProverState& s) const {
  std::vector<Action> out;
  if (s.pre_start) {
    for (std::size_t id : matrix_.start_ids) out.push_back(StartAction{id});
    return out;
  }
  if (s.result != Result::open || s.goal.empty()) return out;
  const Literal& head = s.goal.front();

  std::size_t k = 0;
  for (const Literal& raw : s.path) {
    const Literal p = s.bindings.resolve(raw);
    if (complementary_candidates(head, p) && unify(head.atom, p.atom)) {
      out.push_back(RedAction{k});
    }
    ++k;
  }

  auto it = literal_index_.find({head.predicate(), !head.positive});
  if (it != literal_index_.end()) {
    for (const auto& [cid, j] : it->second) {
      const Literal& l = matrix_.clauses[cid].literals[j];
      if (l.atom.arity() != head.atom.arity()) continue;
      if (unify(head.atom, shift_vars(l.atom, s.next_var))) out.push_back(ExtAction{cid, j});
    }
  }

  if (cfg_.rewrite && !rewrite_rules_.empty()) {
    const std::vector<Position> all = positions(head.atom);
    const VarId offset = s.next_var;
    auto fresh = [offset](VarId v) { return v >= offset; };
    for (const RewriteRule& rule : rewrite_rules_) {
      const Term lhs = shift_vars(rule.lhs, offset);
      const Term rhs = shift_vars(rule.rhs, offset);
      for (std::size_t pi = 1; pi < all.size(); ++pi) {
        const Term& u = subterm_at(head.atom, all[pi]);
        auto sigma = match(lhs, u, fresh);
        if (!sigma || sigma->apply(rhs) == u) continue;
        out.push_back(RewAction{rule.clause_id, rule.eq_literal_index, rule.direction, all[pi]});
      }
    }
  }
  return out;
}

void Calculus::start(ProverState& s, std::size_t clause_id) const {
  const Clause& c = matrix_.clauses.at(clause_id);
  const VarId offset = s.next_var;
  s.next_var += static_cast<VarId>(c.var_count());
  s.goal.clear();
  for (const Literal& l : c.literals) {
    if (l.predicate() == "#") continue;
    s.goal.push_back(shift_vars(l, offset));
  }
  s.path = {};
  s.lemmas = {};
  s.todos = {};
  s.proof = s.proof.push_front(StartStep{clause_id, offset});
  s.pre_start = false;
}

void Calculus::apply_nondet(ProverState& s, const Action& action) const {
  if (const auto* st = std::get_if<StartAction>(&action)) {
    start(s, st->clause_id);
    return;
  }
  if (s.goal.empty()) throw std::logic_error("action applied to a state without goals");
  const Literal head = s.goal.front();
  std::vector<Literal> rest(s.goal.begin() + 1, s.goal.end());

  if (const auto* red = std::get_if<RedAction>(&action)) {
    if (red->path_index >= s.path.size()) throw ActionError("path index out of range");
    const Literal p = s.bindings.resolve(s.path[red->path_index]);
    auto sigma = unify(head.atom, p.atom);
    if (!sigma || !complementary_candidates(head, p)) {
      throw std::logic_error("reduction no longer applicable");
    }
    bind_all(s.bindings, *sigma);
    s.proof = s.proof.push_front(RedStep{head, p});
    s.goal = std::move(rest);
  } else if (const auto* ext = std::get_if<ExtAction>(&action)) {
    const Clause& c = matrix_.clauses.at(ext->clause_id);
    const VarId offset = s.next_var;
    s.next_var += static_cast<VarId>(c.var_count());
    const Literal h = shift_vars(c.literals.at(ext->literal_index), offset);
    auto sigma = unify(head.atom, h.atom);
    if (!sigma || !complementary_candidates(head, h)) {
      throw std::logic_error("extension no longer applicable");
    }
    bind_all(s.bindings, *sigma);
    if (!rest.empty()) s.todos = s.todos.push_front(TodoFrame{rest, s.path, s.lemmas.push_front(head)});
    s.path = s.path.push_front(head);
    s.goal.clear();
    for (std::size_t j = 0; j < c.literals.size(); ++j) {
      if (j != ext->literal_index) s.goal.push_back(shift_vars(c.literals[j], offset));
    }
    s.proof = s.proof.push_front(ExtStep{ext->clause_id, offset, head});
  } else {
    const auto& rew = std::get<RewAction>(action);
    const Clause& c = matrix_.clauses.at(rew.clause_id);
    const VarId offset = s.next_var;
    s.next_var += static_cast<VarId>(c.var_count());
    const Literal eq = shift_vars(c.literals.at(rew.eq_literal_index), offset);
    const Term& lhs = eq.args()[rew.direction == Direction::LR ? 0 : 1];
    const Term& rhs = eq.args()[rew.direction == Direction::LR ? 1 : 0];
    auto sigma = match(lhs, subterm_at(head.atom, rew.position),
                       [offset](VarId v) { return v >= offset; });
    if (!sigma) throw std::logic_error("rewrite no longer applicable");
    bind_all(s.bindings, *sigma);
    const Literal after{head.positive, replace_at(head.atom, rew.position, s.bindings.resolve(rhs))};
    std::vector<Literal> sides;
    for (std::size_t j = 0; j < c.literals.size(); ++j) {
      if (j != rew.eq_literal_index) sides.push_back(shift_vars(c.literals[j], offset));
    }
    if (!rest.empty()) s.todos = s.todos.push_front(TodoFrame{rest, s.path, s.lemmas.push_front(head)});
    s.path = s.path.push_front(head);
    s.goal.clear();
    s.goal.push_back(after);
    s.goal.insert(s.goal.end(), sides.begin(), sides.end());
    s.proof = s.proof.push_front(
        RewStep{rew.clause_id, offset, eq, rew.direction, head, after, std::move(sides)});
  }
  for (Literal& g : s.goal) g = s.bindings.resolve(g);
}

ProverState Calculus::apply_action(const ProverState& s, std::size_t index) const {
  if (index >= s.actions.size()) {
    throw ActionError("action index " + std::to_string(index) + " out of range (" +
                      std::to_string(s.actions.size()) + " actions)");
  }
  ProverState next = s;
  next.actions.clear();
  apply_nondet(next, s.actions[index]);
  next.inference_count += 1;
  det_steps(next);
  return next;
}

void Calculus::det_steps(ProverState& s) const {
  if (s.pre_start) {
    s.actions = valid_actions(s);
    return;
  }
  auto fail = [&s] {
    s.result = Result::failed;
    s.actions.clear();
  };
  while (true) {
    if (s.goal.empty()) {
      if (s.todos.empty()) {
        s.result = Result::proved;
        s.actions.clear();
        return;
      }
      const TodoFrame frame = s.todos.front();
      s.todos = s.todos.pop_front();
      s.goal.clear();
      for (const Literal& g : frame.goal) s.goal.push_back(s.bindings.resolve(g));
      s.path = frame.path;
      s.lemmas = frame.lemmas;
      continue;
    }
    const Literal head = s.goal.front();

    // loop elimination: identity, never unification
    bool loop = false;
    for (const Literal& p : s.path) {
      if (s.bindings.resolve(p) == head) {
        loop = true;
        break;
      }
    }
    if (loop) {
      fail();
      return;
    }

    bool closed = false;
    for (const Literal& l : s.lemmas) {
      if (s.bindings.resolve(l) == head) {
        s.proof = s.proof.push_front(LemStep{head});
        closed = true;
        break;
      }
    }
    if (!closed) {
      const Literal negated = neg_lit(head);
      for (const Literal& raw : s.path) {
        const Literal p = s.bindings.resolve(raw);
        if (p == negated) {
          s.proof = s.proof.push_front(RedStep{head, p});
          closed = true;
          break;
        }
      }
    }
    if (!closed && cfg_.eager_reduction_effective()) {
      for (const Literal& raw : s.path) {
        const Literal p = s.bindings.resolve(raw);
        if (!complementary_candidates(head, p)) continue;
        if (auto sigma = unify(head.atom, p.atom)) {
          bind_all(s.bindings, *sigma);
          s.proof = s.proof.push_front(RedStep{head, p});
          closed = true;
          break;
        }
      }
    }
    if (closed) {
      s.goal.erase(s.goal.begin());
      for (Literal& g : s.goal) g = s.bindings.resolve(g);
      continue;
    }

    std::vector<Action> actions = valid_actions(s);
    if (actions.empty()) {
      fail();
      return;
    }
    // forced chains stop at the path limit, otherwise q(X) | -q(Y) never ends
    if (cfg_.single_action_optim && actions.size() == 1 && s.path.size() <= cfg_.path_limit) {
      apply_nondet(s, actions.front());
      s.inference_count += 1;
      continue;
    }
    if (!goal_is_ground(s.goal) && s.path.size() > cfg_.path_limit) {
      fail();
      return;
    }
    s.result = Result::open;
    s.actions = std::move(actions);
    return;
  }
}

std::string Calculus::theta_text(const ProverState& s, std::size_t clause_id,
                                 VarId offset) const {
  const Clause& c = matrix_.clauses.at(clause_id);
  std::string out = "{";
  for (std::size_t i = 0; i < c.var_names.size(); ++i) {
    if (i) out += ',';
    out += c.var_names[i];
    out += '=';
    out += to_string(s.bindings.resolve(Term::var(offset + static_cast<VarId>(i))));
  }
  return out + "}";
}

std::vector<std::string> Calculus::proof_trace(const ProverState& s) const {
  if (s.result != Result::proved) throw std::logic_error("proof_trace on an unproved state");
  std::vector<ProofStep> steps = s.proof.to_vector();
  std::reverse(steps.begin(), steps.end());
  auto lit = [&s](const Literal& l) { return to_string(s.bindings.resolve(l)); };
  std::vector<std::string> out;
  out.reserve(steps.size());
  for (const ProofStep& step : steps) {
    out.push_back(std::visit(
        overloaded{
            [&](const StartStep& x) {
              return "start " + std::to_string(x.clause_id) + " " +
                     theta_text(s, x.clause_id, x.var_offset);
            },
            [&](const ExtStep& x) {
              return "ext " + std::to_string(x.clause_id) + " " +
                     theta_text(s, x.clause_id, x.var_offset) + " " + lit(x.goal);
            },
            [&](const RedStep& x) { return "red " + lit(x.goal) + " " + lit(x.path_literal); },
            [&](const LemStep& x) { return "lem " + lit(x.literal); },
            [&](const RewStep& x) {
              std::string line = "rew " + std::to_string(x.clause_id) + " " +
                                 theta_text(s, x.clause_id, x.var_offset) + " " +
                                 lit(x.equation) + " " + dir_name(x.direction) + " " +
                                 lit(x.goal_before) + " " + lit(x.goal_after);
              for (const Literal& side : x.side_literals) line += " " + lit(side);
              return line;
            },
        },
        step));
  }
  return out;
}

std::string Calculus::proof_text(const ProverState& s) const {
  std::string out;
  for (const std::string& line : proof_trace(s)) {
    out += line;
    out += '\n';
  }
  return out;
}

std::string describe(const ProverState& s) {
  std::ostringstream out;
  auto lits = [&](auto&& range) {
    std::string text = "[";
    bool first = true;
    for (const Literal& l : range) {
      if (!first) text += ", ";
      first = false;
      text += to_string(s.bindings.resolve(l));
    }
    return text + "]";
  };
  out << "result " << static_cast<int>(s.result) << '\n';
  out << "pre_start " << s.pre_start << '\n';
  out << "goal " << lits(s.goal) << '\n';
  out << "path " << lits(s.path) << '\n';
  out << "lemmas " << lits(s.lemmas) << '\n';
  for (const TodoFrame& f : s.todos) {
    out << "todo " << lits(f.goal) << " path " << lits(f.path) << " lemmas " << lits(f.lemmas)
        << '\n';
  }
  out << "actions";
  for (const Action& a : s.actions) out << ' ' << to_string(a);
  out << '\n';
  out << "proof_length " << s.proof.size() << '\n';
  out << "inferences " << s.inference_count << '\n';
  out << "next_var " << s.next_var << '\n';
  const Substitution subst = s.substitution();
  out << "subst";
  for (const auto& [v, t] : subst.bindings()) out << ' ' << default_var_name(v) << '=' << to_string(t);
  out << '\n';
  return out.str();
}

} // namespace tabcop
