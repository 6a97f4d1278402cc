#include "tabcop/persistent.hpp"

namespace tabcop {

const Term* Bindings::get(VarId v) const {
  if (!root_) return nullptr;
  const std::size_t capacity = std::size_t{1} << (kBits * (levels_ + 1));
  if (v >= capacity) return nullptr;
  const Node* n = root_.get();
  for (unsigned level = levels_; level > 0; --level) {
    n = n->kids[(v >> (kBits * level)) & (kWidth - 1)].get();
    if (!n) return nullptr;
  }
  const auto& slot = n->slots[v & (kWidth - 1)];
  return slot ? &*slot : nullptr;
}

void Bindings::set(VarId v, const Term& t) {
  if (!root_) root_ = std::make_shared<Node>();
  while (v >= (std::size_t{1} << (kBits * (levels_ + 1)))) {
    auto grown = std::make_shared<Node>();
    grown->kids[0] = std::move(root_);
    root_ = std::move(grown);
    ++levels_;
  }
  auto own = [](std::shared_ptr<Node>& p) {
    if (!p) {
      p = std::make_shared<Node>();
    } else if (p.use_count() > 1) {
      p = std::make_shared<Node>(*p);
    }
  };
  own(root_);
  Node* n = root_.get();
  for (unsigned level = levels_; level > 0; --level) {
    auto& kid = n->kids[(v >> (kBits * level)) & (kWidth - 1)];
    own(kid);
    n = kid.get();
  }
  auto& slot = n->slots[v & (kWidth - 1)];
  if (!slot) ++count_;
  slot = t;
}

Term Bindings::walk(Term t) const {
  while (t.is_var()) {
    const Term* b = get(t.var_id());
    if (!b) break;
    t = *b;
  }
  return t;
}

Term Bindings::resolve(const Term& t0) const {
  if (t0.is_ground() || count_ == 0) return t0;
  Term t = walk(t0);
  if (t.is_var() || t.is_ground()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back(resolve(a));
    changed = changed || !args.back().same_node(a);
  }
  if (!changed) return t;
  return Term::app(t.symbol(), std::move(args));
}

Literal Bindings::resolve(const Literal& l) const { return Literal{l.positive, resolve(l.atom)}; }

} // namespace tabcop
