#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>

#include "oracles.hpp"
#include "tabcop/features.hpp"
#include "tabcop/hash.hpp"

using namespace tabcop;

namespace {

Literal lit(const std::string& text) {
  VarScope scope;
  SyntaxReader r(text);
  return r.read_literal(scope);
}

std::map<std::string, double> as_map(const RawFeatures& raw) {
  std::map<std::string, double> m;
  for (const auto& [k, v] : raw) m[k] += v;
  return m;
}

// Independent walk enumeration: every downward chain of 1..3 symbols.
void chains(const Term& t, std::vector<std::string> above, const std::string& prefix,
            std::map<std::string, double>& out, bool root_label_given = false,
            const std::string& root_label = "") {
  const std::string me = root_label_given ? root_label : (t.is_var() ? "*" : t.symbol());
  above.push_back(me);
  for (std::size_t len = 1; len <= std::min<std::size_t>(3, above.size()); ++len) {
    std::string tok;
    for (std::size_t i = above.size() - len; i < above.size(); ++i) tok += (tok.empty() ? "" : ".") + above[i];
    out[prefix + tok] += 1;
  }
  if (t.is_var()) return;
  for (const Term& c : t.args()) chains(c, above, prefix, out);
}

} // namespace

TEST_CASE("walks of p(f(a))") {
  const Literal g = lit("p(f(a))");
  auto m = as_map(raw_features(std::span<const Literal>(&g, 1), {}));
  for (const char* tok : {"g:p", "g:p.f", "g:p.f.a", "g:f", "g:f.a", "g:a"}) {
    CHECK(m[tok] == 1.0);
  }
  CHECK(m["s:goals"] == 1);
  CHECK(m["s:symbols"] == 3);
  CHECK(m["s:path"] == 0);
  std::size_t walks = 0;
  for (const auto& [k, v] : m) walks += k.rfind("g:", 0) == 0;
  CHECK(walks == 6);
}

TEST_CASE("negative literal folds polarity into the predicate token") {
  const Literal g = lit("-p(a)");
  auto m = as_map(raw_features(std::span<const Literal>(&g, 1), {}));
  CHECK(m["g:~p"] == 1);
  CHECK(m["g:~p.a"] == 1);
  CHECK(m.count("g:p") == 0);
}

TEST_CASE("walks agree with an independent chain enumeration") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const Term t = oracle::random_term(rng, 10);
    const Literal l{(i % 2) == 0, Term::app("p", {t, oracle::random_term(rng, 5)})};
    RawFeatures raw;
    literal_walks(l, "g:", raw);
    std::map<std::string, double> expect;
    chains(l.atom, {}, "g:", expect, true, (l.positive ? "" : "~") + std::string("p"));
    CHECK(as_map(raw) == expect);
  }
}

TEST_CASE("variables are abstracted") {
  const Literal a = lit("p(X, f(Y))");
  const Literal b = lit("p(Z, f(Z))");
  CHECK(as_map(raw_features(std::span<const Literal>(&a, 1), {})) ==
        as_map(raw_features(std::span<const Literal>(&b, 1), {})));
}

TEST_CASE("empty goal gives only zero scalars") {
  const RawFeatures raw = raw_features({}, {});
  for (const auto& [k, v] : raw) {
    CHECK(k.rfind("s:", 0) == 0);
    CHECK(v == 0.0);
  }
  CHECK(compress(raw, 100).entries.empty());
}

TEST_CASE("top symbols break ties lexicographically") {
  const std::vector<Literal> goals{lit("p(b, a)"), lit("q(c)")};
  auto m = as_map(raw_features(goals, {}));
  CHECK(m.count("s:top:a") == 1);
  CHECK(m.count("s:top:b") == 1);
  CHECK(m.count("s:top:c") == 0);
  const std::vector<Literal> g2{lit("p(f(f(a)))")};
  auto m2 = as_map(raw_features(g2, {}));
  CHECK(m2.count("s:top:f") == 1);
  CHECK(m2.count("s:top:a") == 1);
}

TEST_CASE("compression sums colliding tokens") {
  // find two tokens that collide modulo 10 at indices 3
  std::vector<std::string> at3;
  for (int i = 0; at3.size() < 2; ++i) {
    const std::string tok = "t" + std::to_string(i);
    if (fnv1a(tok) % 10 == 3) at3.push_back(tok);
  }
  const FeatureVector fv = compress({{at3[0], 1.0}, {at3[1], 2.0}}, 10);
  REQUIRE(fv.entries.size() == 1);
  CHECK(fv.entries[0].first == 3);
  CHECK(fv.entries[0].second == 3.0);
  CHECK(compress({}, 10).entries.empty());
}

TEST_CASE("compression conserves mass and stays in range") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    std::vector<Literal> goals;
    for (int k = 0; k < 3; ++k) goals.push_back(Literal{k == 1, Term::app("p", {oracle::random_term(rng, 8)})});
    const RawFeatures raw = raw_features(goals, {});
    double total = 0;
    for (const auto& [k, v] : raw) total += v;
    const std::size_t dim = 1 + rng() % 50;
    const FeatureVector fv = compress(raw, dim);
    CHECK(fv.sum() == doctest::Approx(total).epsilon(1e-12));
    for (const auto& [idx, v] : fv.entries) {
      CHECK(idx < dim);
      CHECK(v > 0);
    }
    CHECK(std::is_sorted(fv.entries.begin(), fv.entries.end()));
  }
}

TEST_CASE("extractor: cache, determinism, todo independence, action tags") {
  Config cfg;
  cfg.single_action_optim = false;
  const Calculus calc(parse_problem("p(a) | #.\n-p(X) | q(X).\n-q(a).\n-p(a).\n"), cfg);
  ProverState s = calc.initial_states().at(0);
  FeatureExtractor fx(calc, 1000);
  const FeatureVector first = fx.state_features(s);
  const FeatureVector again = fx.state_features(s);
  CHECK(first == again);
  CHECK(fx.cache_hits() == 1);
  FeatureExtractor fresh(calc, 1000);
  CHECK(fresh.state_features(s) == first);

  ProverState t = s;
  t.todos = t.todos.push_front(TodoFrame{{lit("r(b)")}, {}, {}});
  CHECK(fx.state_features(t) == first);

  // red vs ext on the same literal
  REQUIRE(s.actions.size() >= 1);
  s = calc.apply_action(s, 0); // ext into -p(X) | q(X)
  REQUIRE(s.result == Result::open);
  std::size_t ext_i = s.actions.size(), red_i = s.actions.size();
  for (std::size_t i = 0; i < s.actions.size(); ++i) {
    if (std::holds_alternative<ExtAction>(s.actions[i])) ext_i = std::min(ext_i, i);
    if (std::holds_alternative<RedAction>(s.actions[i])) red_i = std::min(red_i, i);
  }
  if (ext_i < s.actions.size()) {
    CHECK(fx.view(s, s.actions[ext_i]).tag == "ext");
    const FeatureVector fa = fx.action_features(s, ext_i);
    CHECK(fa.sum() > fx.state_features(s).sum());
    FeatureExtractor other(calc, 1000);
    CHECK(other.action_features(s, ext_i) == fa);
  }
  if (red_i < s.actions.size()) CHECK(fx.view(s, s.actions[red_i]).tag == "red");
}

TEST_CASE("ext and red views of the same literal hash differently") {
  const Literal l = lit("p(a)");
  ActionView ext{"ext", {l}}, red{"red", {l}};
  const auto a = compress(raw_features({}, {}, &ext), 10000);
  const auto b = compress(raw_features({}, {}, &red), 10000);
  CHECK(!(a == b));
  CHECK(a.sum() == b.sum());
}
