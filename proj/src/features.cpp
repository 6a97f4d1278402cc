#include "tabcop/features.hpp"

#include <algorithm>
#include <map>

#include "tabcop/hash.hpp"

namespace tabcop {

namespace {

constexpr std::size_t kMaxCacheEntries = 200000;

std::string label(const Term& t) { return t.is_var() ? "*" : t.symbol(); }

void walks_from(const Term& t, const std::string& head, const std::string& prefix,
                RawFeatures& out) {
  out.emplace_back(prefix + head, 1.0);
  if (t.is_var()) return;
  for (const Term& c : t.args()) {
    const std::string two = head + "." + label(c);
    out.emplace_back(prefix + two, 1.0);
    if (c.is_var()) continue;
    for (const Term& d : c.args()) out.emplace_back(prefix + two + "." + label(d), 1.0);
  }
}

void all_walks(const Term& t, const std::string& prefix, RawFeatures& out) {
  walks_from(t, label(t), prefix, out);
  if (t.is_var()) return;
  for (const Term& c : t.args()) all_walks(c, prefix, out);
}

void count_symbols(const Term& t, std::map<std::string, std::size_t>& counts) {
  if (t.is_var()) return;
  ++counts[t.symbol()];
  for (const Term& c : t.args()) count_symbols(c, counts);
}

std::string canonical(const Literal& l) {
  static const VarNamer star = [](VarId) { return std::string("*"); };
  return to_string(l, star);
}

} // namespace

double FeatureVector::get(std::uint32_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](const auto& e, std::uint32_t i) { return e.first < i; });
  return it != entries.end() && it->first == index ? it->second : 0.0;
}

double FeatureVector::sum() const {
  double s = 0;
  for (const auto& [i, v] : entries) s += v;
  return s;
}

void literal_walks(const Literal& lit, const std::string& prefix, RawFeatures& out) {
  const std::string root = (lit.positive ? "" : "~") + lit.predicate();
  walks_from(lit.atom, root, prefix, out);
  for (const Term& c : lit.atom.args()) all_walks(c, prefix, out);
}

RawFeatures raw_features(std::span<const Literal> goals, std::span<const Literal> path,
                         const ActionView* action) {
  RawFeatures out;
  for (const Literal& g : goals) literal_walks(g, "g:", out);
  for (const Literal& p : path) literal_walks(p, "p:", out);
  if (action) {
    const std::string prefix = "a:" + action->tag + ":";
    for (const Literal& l : action->literals) literal_walks(l, prefix, out);
  }

  const TermStats st = term_stats(goals);
  out.emplace_back("s:goals", static_cast<double>(goals.size()));
  out.emplace_back("s:symbols", static_cast<double>(st.symbol_count));
  out.emplace_back("s:max_size", static_cast<double>(st.max_size));
  out.emplace_back("s:max_depth", static_cast<double>(st.max_depth));
  out.emplace_back("s:path", static_cast<double>(path.size()));

  std::map<std::string, std::size_t> counts;
  for (const Literal& g : goals) count_symbols(g.atom, counts);
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // map order already breaks frequency ties lexicographically
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t i = 0; i < ranked.size() && i < 2; ++i) {
    out.emplace_back("s:top:" + ranked[i].first, 1.0);
  }
  return out;
}

FeatureVector compress(const RawFeatures& raw, std::size_t dim) {
  std::vector<std::pair<std::uint32_t, double>> cells;
  cells.reserve(raw.size());
  for (const auto& [token, value] : raw) {
    if (value == 0.0) continue;
    cells.emplace_back(static_cast<std::uint32_t>(fnv1a(token) % dim), value);
  }
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  FeatureVector fv;
  fv.dim = dim;
  for (const auto& [i, v] : cells) {
    if (!fv.entries.empty() && fv.entries.back().first == i) {
      fv.entries.back().second += v;
    } else {
      fv.entries.emplace_back(i, v);
    }
  }
  return fv;
}

FeatureExtractor::FeatureExtractor(const Calculus& calc, std::size_t dim)
    : calc_(calc), dim_(dim) {}

ActionView FeatureExtractor::view(const ProverState& s, const Action& a) const {
  const Matrix& m = calc_.matrix();
  ActionView v;
  if (const auto* st = std::get_if<StartAction>(&a)) {
    v.tag = "start";
    v.literals = m.clauses.at(st->clause_id).literals;
  } else if (const auto* ext = std::get_if<ExtAction>(&a)) {
    v.tag = "ext";
    v.literals = m.clauses.at(ext->clause_id).literals;
  } else if (const auto* red = std::get_if<RedAction>(&a)) {
    v.tag = "red";
    v.literals.push_back(s.bindings.resolve(s.path[red->path_index]));
  } else {
    const auto& rew = std::get<RewAction>(a);
    v.tag = rew.direction == Direction::LR ? "rew:LR" : "rew:RL";
    v.literals.push_back(m.clauses.at(rew.clause_id).literals.at(rew.eq_literal_index));
  }
  return v;
}

const FeatureVector* FeatureExtractor::lookup(std::uint64_t h, const std::string& key) {
  auto it = cache_.find(h);
  if (it == cache_.end()) return nullptr;
  for (const Entry& e : it->second) {
    if (e.key == key) {
      ++hits_;
      return &e.value;
    }
  }
  return nullptr;
}

void FeatureExtractor::store(std::uint64_t h, std::string key, const FeatureVector& v) {
  if (cache_size_ >= kMaxCacheEntries) clear_cache();
  cache_[h].push_back(Entry{std::move(key), v});
  ++cache_size_;
}

void FeatureExtractor::clear_cache() {
  cache_.clear();
  cache_size_ = 0;
}

FeatureVector FeatureExtractor::state_features(const ProverState& s) {
  std::vector<Literal> path;
  path.reserve(s.path.size());
  for (const Literal& p : s.path) path.push_back(s.bindings.resolve(p));

  std::uint64_t h = kFnvOffset;
  std::string key;
  for (const Literal& g : s.goal) {
    h = hash_mix(h, literal_hash(g, 3));
    key += canonical(g);
    key += ';';
  }
  key += '|';
  h = hash_mix(h, 0x7c);
  for (const Literal& p : path) {
    h = hash_mix(h, literal_hash(p, 3));
    key += canonical(p);
    key += ';';
  }
  if (const FeatureVector* hit = lookup(h, key)) return *hit;
  FeatureVector fv = compress(raw_features(s.goal, path), dim_);
  store(h, std::move(key), fv);
  return fv;
}

FeatureVector FeatureExtractor::action_features(const ProverState& s, std::size_t action_index) {
  const ActionView v = view(s, s.actions.at(action_index));
  const FeatureVector base = state_features(s);
  // Compression is additive, so the action walks are hashed on their own and
  // added to the state vector.
  std::uint64_t h = fnv1a(v.tag);
  std::string key = "a|" + v.tag + "|";
  for (const Literal& l : v.literals) {
    h = hash_mix(h, literal_hash(l, 3));
    key += canonical(l);
    key += ';';
  }
  const FeatureVector* part = lookup(h, key);
  FeatureVector fresh;
  if (!part) {
    RawFeatures raw;
    const std::string prefix = "a:" + v.tag + ":";
    for (const Literal& l : v.literals) literal_walks(l, prefix, raw);
    fresh = compress(raw, dim_);
    store(h, std::move(key), fresh);
    part = &fresh;
  }
  FeatureVector out;
  out.dim = dim_;
  out.entries.reserve(base.entries.size() + part->entries.size());
  auto a = base.entries.begin(), b = part->entries.begin();
  while (a != base.entries.end() || b != part->entries.end()) {
    if (b == part->entries.end() || (a != base.entries.end() && a->first < b->first)) {
      out.entries.push_back(*a++);
    } else if (a == base.entries.end() || b->first < a->first) {
      out.entries.push_back(*b++);
    } else {
      out.entries.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  return out;
}

} // namespace tabcop
