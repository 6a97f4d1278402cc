// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "gbt_checks.hpp"
#include "mutations.hpp"
#include "oracles.hpp"
#include "search_checks.hpp"
#include "tabcop/checker.hpp"
#include "tabcop/guidance.hpp"
#include "tabcop/mcts.hpp"
#include "tabcop/training.hpp"

using namespace tabcop;
namespace fs = std::filesystem;

namespace {

// tolerances and sizes
constexpr double kClosedFormTol = 1e-9;
constexpr double kSoftmaxTol = 1e-9;
constexpr double kConstantFitTol = 1e-6;
constexpr double kStepRmse = 0.01;
constexpr std::size_t kStepRounds = 20;
constexpr double kUnifySeconds = 10.0;
constexpr int kUnifyPairs = 10000;
constexpr int kUnifyMaxSize = 12;
constexpr int kSoftmaxVectors = 1000;
constexpr int kMctsProblems = 100;
constexpr int kUctChecks = 10000;
constexpr int kSplitDatasets = 50;
constexpr int kDpllSets = 1000;
constexpr int kDpllMaxVars = 15;
constexpr double kProvedFraction = 0.70;
constexpr std::size_t kReducedBudget = 20000;
constexpr std::size_t kLoopIterations = 3; // iter0 plus two retrained rounds
constexpr std::size_t kFailingBudget = 20; // a third of the corpus fails here

const fs::path kSource = TABCOP_SOURCE_DIR;
const fs::path kCorpus = kSource / "corpus";

struct Line {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tabcop_accept_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string join(const std::vector<std::string>& lines) {
  std::string t;
  for (const auto& l : lines) t += l + "\n";
  return t;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Line unification() {
  std::mt19937_64 rng(2024);
  std::vector<std::pair<Term, Term>> pairs;
  for (int i = 0; i < kUnifyPairs; ++i) {
    pairs.emplace_back(oracle::random_term(rng, kUnifyMaxSize), oracle::random_term(rng, kUnifyMaxSize));
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::optional<Substitution>> fast;
  for (const auto& [a, b] : pairs) fast.push_back(unify(a, b));
  const double elapsed = seconds_since(t0);

  int agree = 0, unified = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, b] = pairs[i];
    const auto slow = oracle::brute_force_unify(a, b);
    if (fast[i].has_value() != slow.has_value()) continue;
    if (fast[i]) {
      const Term inst = fast[i]->apply(a);
      if (!(inst == fast[i]->apply(b)) || !oracle::variant(inst, *slow)) continue;
      ++unified;
    }
    ++agree;
  }
  return {agree == kUnifyPairs && elapsed < kUnifySeconds,
          std::to_string(agree) + "/" + std::to_string(kUnifyPairs) + " agree (" + std::to_string(unified) +
              " unifiable), unifier " + fmt("%.3f s", elapsed)};
}

Line closed_forms() {
  std::vector<std::string> bad;
  auto near = [&](const std::string& what, double got, double want) {
    if (std::abs(got - want) > kClosedFormTol) bad.push_back(what);
  };
  near("default_value(0)", default_value(0), 1.0 / (1.0 + std::exp(-1.2)));
  near("default_value(0) digits", std::round(default_value(0) * 1e6) / 1e6, 0.768525);
  near("default_value(inf)", default_value(100000), 1.0 / (1.0 + std::exp(2.5)));
  if (!(default_value(10) > default_value(20))) bad.push_back("default_value monotone");
  near("default_policy(1)", default_policy(1).at(0), 1.0);
  for (double p : default_policy(4)) near("default_policy(4)", p, 0.25);
  near("value_target(0)", value_target(0), 3.0);
  const double p69 = std::pow(0.99, 69);
  near("value_target(69)", value_target(69), std::log(p69 / (1 - p69)));
  if (std::abs(value_target(69)) > 0.01) bad.push_back("value_target(69) near 0");
  near("value_target(fail)", value_target(std::nullopt), -3.0);
  near("value_from_prediction(g=0)", value_from_prediction(-4.2, 0), 1.0);
  near("value_from_prediction(0,2)", value_from_prediction(0.0, 2), 0.5);
  if (!(value_from_prediction(0.3, 4) < value_from_prediction(0.3, 2))) bad.push_back("value_from_prediction g");
  near("policy_target(uniform)", policy_target(12, 3, 4), 0.0);
  near("policy_target(10,5,4)", policy_target(10, 5, 4), std::log(2.0));
  near("policy_target(clip)", policy_target(1e6, 1, 2), -6.0);
  const auto z = priors_from_predictions(std::vector<double>{0, 0}, 2.0);
  near("softmax [0,0]", z[0], 0.5);
  const auto s = priors_from_predictions(std::vector<double>{2, 0}, 2.0);
  near("softmax [2,0]", s[0], std::exp(1.0) / (std::exp(1.0) + 1));
  near("softmax [2,0] second", s[1], 1 / (std::exp(1.0) + 1));
  for (std::size_t k = 0; k < 2000; ++k) {
    const double v = value_target(k);
    if (std::abs(v) < 3.0) near("logit round trip", sigmoid(v), std::pow(0.99, static_cast<double>(k)));
  }

  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd(0, 5);
  double worst = 0;
  for (int i = 0; i < kSoftmaxVectors; ++i) {
    std::vector<double> sc(1 + rng() % 20);
    for (double& x : sc) x = nd(rng);
    double sum = 0;
    for (double x : priors_from_predictions(sc, 2.0)) sum += x;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  if (worst > kSoftmaxTol) bad.push_back("softmax sums");
  std::string detail = "max softmax sum error " + fmt("%.2e", worst);
  for (const auto& b : bad) detail += "; off: " + b;
  return {bad.empty(), detail};
}

Line mcts_invariants() {
  std::mt19937_64 rng(77);
  int violations = 0, playouts = 0, problems = 0, draws = 0;
  std::string first;
  // problems settled before the first playout do not count
  while (problems < kMctsProblems && draws < 50 * kMctsProblems) {
    ++draws;
    Config cfg;
    cfg.single_action_optim = draws % 2 == 0;
    cfg.bigstep_freq = 5 + draws % 7;
    const Calculus calc(parse_problem(oracle::random_matrix_text(rng, draws % 3 == 0)), cfg);
    DefaultGuidance g;
    Search s(calc, g, cfg, 1.0 + draws % 4);
    bool counted = false;
    for (int i = 0; i < 80 && s.playout(); ++i) {
      if (!counted) ++problems;
      counted = true;
      ++playouts;
      const std::string v = oracle::tree_violation(s);
      if (!v.empty()) {
        ++violations;
        if (first.empty()) first = v;
      }
      if (s.playouts() % cfg.bigstep_freq == 0) s.bigstep();
    }
  }
  int mismatches = 0;
  for (int i = 0; i < kUctChecks; ++i) {
    const auto nodes = oracle::random_family(rng);
    const double cp = (rng() % 9) * 0.5;
    mismatches += select_child(nodes, 0, cp) != oracle::brute_force_select(nodes, 0, cp);
  }
  std::string detail = std::to_string(problems) + " problems, " + std::to_string(playouts) + " playouts, " +
                       std::to_string(violations) +
                       " invariant violations; UCT " + std::to_string(kUctChecks - mismatches) + "/" +
                       std::to_string(kUctChecks) + " match";
  if (!first.empty()) detail += "; first: " + first;
  return {violations == 0 && mismatches == 0 && problems == kMctsProblems, detail};
}

Line training_contracts() {
  // only the branch through s(a) proves
  const Matrix m = parse_problem("p(a).\n-p(X) | r(X).\n-p(a) | s(a).\n-s(a).\n");
  Config cfg;
  cfg.single_action_optim = false;
  const Calculus calc(m, cfg);
  DefaultGuidance g;
  FeatureExtractor fx(calc, 500);
  std::vector<std::string> bad;

  Config starved = cfg;
  starved.inference_limit = 1;
  Search failed(calc, g, starved, 3.0);
  failed.run();
  const TrainingData none = extract_training_data(failed, fx, starved);
  if (failed.proved_node() >= 0 || !none.policy.empty()) bad.push_back("policy rows without a proof");

  Search s(calc, g, cfg, 3.0);
  if (s.run().outcome != Outcome::proved) {
    return {false, "two-choice problem not proved"};
  }
  const TrainingData d = extract_training_data(s, fx, cfg);
  const auto path = s.proof_path();
  const auto& bigsteps = s.bigstep_nodes();
  std::size_t off_bigstep = 0;
  for (int v : path) off_bigstep += std::find(bigsteps.begin(), bigsteps.end(), v) == bigsteps.end();
  if (off_bigstep == 0) bad.push_back("proof path has no non-bigstep node");
  const std::size_t total = s.nodes()[s.proved_node()].state.proof_length();
  for (int v : path) {
    const auto& n = s.nodes()[v];
    const FeatureVector x = fx.state_features(n.state);
    const double y = value_target(total - n.state.proof_length());
    const bool found = std::any_of(d.value.begin(), d.value.end(),
                                   [&](const Row& r) { return r.x == x && std::abs(r.y - y) < 1e-12; });
    if (!found) bad.push_back("missing value row for path node " + std::to_string(v));
  }
  std::size_t expected_policy = 0;
  for (int v : path) {
    for (int c : s.nodes()[v].children) expected_policy += c >= 0;
  }
  if (d.policy.size() != expected_policy) bad.push_back("policy rows for proof-path children");

  // duplicates: repeat every row with lower and higher targets
  std::vector<Row> rows = d.value;
  for (const Row& r : d.value) {
    rows.push_back(Row{r.x, r.y - 1.0, 1.0});
    rows.push_back(Row{r.x, r.y + 0.5, 1.0});
  }
  std::vector<Row> filtered = rows;
  dedupe_max(filtered);
  if (filtered.size() != d.value.size()) bad.push_back("dedupe size");
  for (std::size_t i = 0; i < filtered.size() && i < d.value.size(); ++i) {
    if (!(filtered[i].x == d.value[i].x) || filtered[i].y != d.value[i].y + 0.5) bad.push_back("dedupe keeps max");
  }
  Config lcfg;
  lcfg.feature_dim = 500;
  lcfg.learner.rounds = 20;
  std::ostringstream with_dups, without;
  train_models_on(Dataset{500, rows}, lcfg, 3).save(with_dups);
  train_models_on(Dataset{500, filtered}, lcfg, 3).save(without);
  if (with_dups.str() != without.str()) bad.push_back("training sees duplicates");

  std::string detail = std::to_string(d.value.size()) + " value rows, " + std::to_string(d.policy.size()) +
                       " policy rows, " + std::to_string(off_bigstep) + " proof-path nodes off the bigstep chain";
  for (const auto& b : bad) detail += "; " + b;
  return {bad.empty(), detail};
}

Line learner() {
  using oracle::fv;
  std::vector<std::string> bad;
  std::mt19937_64 rng(8);

  Dataset c = oracle::random_dataset(rng, 80, 6, 8);
  for (Row& r : c.rows) r.y = -1.75;
  const GbtModel cm = train(c, LearnerParams{}, 0);
  double cerr = 0;
  for (const Row& r : c.rows) cerr = std::max(cerr, std::abs(cm.predict(r.x) + 1.75));
  if (cerr > kConstantFitTol) bad.push_back("constant fit");

  Dataset step;
  step.dim = 4;
  for (int i = 0; i < 100; ++i) {
    const double v = 1 + i % 10;
    step.rows.push_back(Row{fv(4, {{2, v}}), v < 5 ? -1.0 : 2.0, 1.0});
  }
  LearnerParams sp;
  sp.rounds = kStepRounds;
  sp.sign_balance = false;
  const GbtModel sm = train(step, sp, 0);
  const double step_rmse = oracle::rmse(sm, step);
  if (sm.trees.size() > kStepRounds || step_rmse >= kStepRmse) bad.push_back("step function");

  int split_ok = 0;
  for (int t = 0; t < kSplitDatasets; ++t) {
    const std::size_t n = 5 + rng() % 60, feats = 1 + rng() % 8;
    const Dataset d = oracle::random_dataset(rng, n, feats, feats);
    std::vector<double> g(n), h(n, 1.0);
    for (std::size_t r = 0; r < n; ++r) g[r] = -d.rows[r].y;
    std::vector<std::size_t> idx(n);
    for (std::size_t r = 0; r < n; ++r) idx[r] = r;
    const Tree tree = fit_tree(d.rows, idx, g, h, 1.5, 1);
    const double best = oracle::brute_force_gain(d.rows, g, h, 1.5, feats);
    if (best <= 1e-12) {
      split_ok += tree.nodes[0].leaf;
    } else if (!tree.nodes[0].leaf) {
      split_ok += std::abs(oracle::split_gain(d.rows, g, h, 1.5, tree.nodes[0]) - best) <= 1e-9 * std::max(1.0, best);
    }
  }
  if (split_ok != kSplitDatasets) bad.push_back("split choice");

  bool monotone = true;
  for (int t = 0; t < 5; ++t) {
    const Dataset d = oracle::random_dataset(rng, 150, 10, 12);
    LearnerParams p;
    p.rounds = 60;
    p.patience = 1000;
    TrainLog log;
    train(d, p, static_cast<std::uint64_t>(t), &log);
    for (std::size_t i = 1; i < log.train_rmse.size(); ++i) monotone &= log.train_rmse[i] <= log.train_rmse[i - 1] + 1e-12;
  }
  if (!monotone) bad.push_back("train rmse increased");

  const Dataset pd = oracle::random_dataset(rng, 120, 8, 16);
  const GbtModel pm = train(pd, LearnerParams{}, 4);
  std::stringstream ss;
  pm.save(ss);
  const GbtModel back = GbtModel::load(ss);
  bool same = true;
  for (const Row& r : pd.rows) same &= back.predict(r.x) == pm.predict(r.x);
  if (!same) bad.push_back("save/load");

  std::string detail = "constant err " + fmt("%.1e", cerr) + ", step rmse " + fmt("%.2e", step_rmse) + " in " +
                       std::to_string(sm.trees.size()) + " rounds, splits " + std::to_string(split_ok) + "/" +
                       std::to_string(kSplitDatasets);
  for (const auto& b : bad) detail += "; " + b;
  return {bad.empty(), detail};
}

Line checker() {
  std::vector<std::string> bad;
  std::mt19937_64 rng(123);
  int dpll_agree = 0;
  for (int t = 0; t < kDpllSets; ++t) {
    const int nv = 1 + static_cast<int>(rng() % kDpllMaxVars);
    const int nc = static_cast<int>(rng() % (5 * nv + 2));
    std::vector<std::vector<int>> cs;
    for (int c = 0; c < nc; ++c) {
      std::vector<int> cl;
      const int len = 1 + static_cast<int>(rng() % 4);
      for (int l = 0; l < len; ++l) {
        const int v = 1 + static_cast<int>(rng() % nv);
        cl.push_back(rng() % 2 ? v : -v);
      }
      cs.push_back(cl);
    }
    const auto model = check::solve(cs, static_cast<std::size_t>(nv));
    bool ok = model.has_value() == oracle::truth_table_sat(cs, nv);
    if (model) {
      for (const auto& c : cs) {
        ok &= std::any_of(c.begin(), c.end(), [&](int l) { return (*model)[std::abs(l) - 1] == (l > 0); });
      }
    }
    dpll_agree += ok;
  }
  if (dpll_agree != kDpllSets) bad.push_back("dpll");

  const Matrix tiny = parse_problem("-p(X).\np(Y) | -q(a).\nq(a).\n");
  if (!check::check_proof_text("start 2 {}\next 1 {Y=a} q(a)\next 0 {X=a} p(a)\n", tiny).ok) {
    bad.push_back("tiny proof");
  }

  std::size_t proofs = 0, accepted = 0, mutants = 0, rejected = 0;
  std::map<std::string, std::size_t> kinds;
  for (bool rewrite : {false, true}) {
    Config cfg;
    cfg.rewrite = rewrite;
    for (const auto& f : list_problems(kCorpus.string())) {
      const Matrix m = prepare_matrix(load_problem(f), cfg);
      const ProblemRun run = search_problem(f, m, cfg, nullptr, cfg.cp_initial, false);
      if (run.result.outcome != Outcome::proved) continue;
      ++proofs;
      const std::string text = join(run.result.proof);
      accepted += check::check_proof_text(text, m).ok;
      for (const auto& mut : oracle::mutation_battery(text, m)) {
        ++kinds[mut.kind];
        ++mutants;
        rejected += !check::check_proof_text(mut.text, m).ok;
      }
    }
  }
  if (accepted != proofs || proofs == 0) bad.push_back("corpus acceptance");
  if (rejected != mutants || kinds.size() != 4) bad.push_back("mutation battery");

  std::string detail = "dpll " + std::to_string(dpll_agree) + "/" + std::to_string(kDpllSets) + ", proofs " +
                       std::to_string(accepted) + "/" + std::to_string(proofs) + " accepted, mutants " +
                       std::to_string(rejected) + "/" + std::to_string(mutants) + " rejected (";
  bool first = true;
  for (const auto& [k, n] : kinds) {
    detail += (first ? "" : " ") + k + "=" + std::to_string(n);
    first = false;
  }
  detail += ")";
  for (const auto& b : bad) detail += "; " + b;
  return {bad.empty(), detail};
}

Line iteration0_coverage() {
  const Config cfg;
  std::size_t proved = 0;
  const auto files = list_problems(kCorpus.string());
  for (const auto& f : files) {
    const Matrix m = prepare_matrix(load_problem(f), cfg);
    proved += search_problem(f, m, cfg, nullptr, cfg.cp_initial, false).result.outcome == Outcome::proved;
  }
  const double frac = static_cast<double>(proved) / static_cast<double>(files.size());
  return {frac >= kProvedFraction,
          std::to_string(proved) + "/" + std::to_string(files.size()) + " proved (" + fmt("%.1f%%", 100 * frac) + ")"};
}

Line rewriting_shortens() {
  std::size_t inf[2] = {0, 0};
  bool proved[2] = {false, false};
  for (int on = 0; on < 2; ++on) {
    Config cfg;
    cfg.rewrite = on == 1;
    const Matrix m = prepare_matrix(load_problem((kCorpus / "eq_chain_16.p").string()), cfg);
    const SearchResult r = search_problem("eq_chain_16", m, cfg, nullptr, cfg.cp_initial, false).result;
    proved[on] = r.outcome == Outcome::proved;
    inf[on] = r.inferences;
  }
  return {proved[0] && proved[1] && inf[1] < inf[0],
          "rewrite off " + std::to_string(inf[0]) + (proved[0] ? "" : " (unproved)") + ", rewrite on " +
              std::to_string(inf[1]) + (proved[1] ? "" : " (unproved)") + " inferences"};
}

Line learning_helps() {
  Config cfg;
  cfg.inference_limit = kReducedBudget;
  const auto reports = run_loop(kCorpus.string(), scratch("loop").string(), kLoopIterations, cfg);
  std::string detail = "proved per iteration at " + std::to_string(kReducedBudget) + " inferences:";
  for (const auto& r : reports) detail += " " + std::to_string(r.proved);
  if (reports.size() != kLoopIterations) return {false, detail};

  // inferences on problems proved in both the first and the last round
  auto parse = [](const IterationReport& r) {
    std::map<std::string, std::pair<std::string, std::size_t>> out;
    for (const auto& line : r.stats) {
      std::istringstream in(line);
      std::string name, status;
      std::size_t inf = 0;
      std::getline(in, name, '\t');
      std::getline(in, status, '\t');
      in >> inf;
      out[name] = {status, inf};
    }
    return out;
  };
  const auto first = parse(reports.front()), last = parse(reports.back());
  std::size_t before = 0, after = 0;
  std::string lost, gained;
  for (const auto& [name, a] : first) {
    const auto& b = last.at(name);
    const bool pa = a.first == "proved", pb = b.first == "proved";
    if (pa && pb) {
      before += a.second;
      after += b.second;
    }
    if (pa && !pb) lost += " " + name;
    if (!pa && pb) gained += " " + name;
  }
  detail += "; inferences on problems proved in both " + std::to_string(before) + " -> " + std::to_string(after);
  if (!lost.empty()) detail += "; lost:" + lost;
  if (!gained.empty()) detail += "; gained:" + gained;
  return {reports.back().proved >= reports.front().proved, detail};
}

Line limited_policy() {
  Config on, off;
  on.inference_limit = off.inference_limit = kFailingBudget;
  off.limited_policy = false;
  std::set<std::string> a, b;
  const fs::path don = scratch("limited_on"), doff = scratch("limited_off");
  const IterationReport ron = run_iteration(kCorpus.string(), don.string(), 0, on, nullptr, a);
  const IterationReport roff = run_iteration(kCorpus.string(), doff.string(), 0, off, nullptr, b);

  std::multiset<std::string> lines_on, lines_off;
  auto load = [](const fs::path& p, std::multiset<std::string>& out) {
    std::istringstream in(slurp(p));
    for (std::string l; std::getline(in, l);) {
      if (!l.empty() && l[0] != '#') out.insert(l);
    }
  };
  load(don / "iter0" / "policy.data", lines_on);
  load(doff / "iter0" / "policy.data", lines_off);
  const bool subset = std::includes(lines_off.begin(), lines_off.end(), lines_on.begin(), lines_on.end());
  const bool strict = lines_on.size() < lines_off.size();

  // per problem: policy rows only where a proof was found
  bool only_proved = true;
  for (const auto& f : list_problems(kCorpus.string())) {
    const Matrix m = prepare_matrix(load_problem(f), on);
    const ProblemRun r = search_problem(f, m, on, nullptr, on.cp_initial, true);
    if (r.result.outcome != Outcome::proved && !r.data.policy.empty()) only_proved = false;
  }
  const std::size_t failed = ron.attempted - ron.proved;
  return {subset && strict && only_proved && failed * 3 >= ron.attempted,
          std::to_string(failed) + "/" + std::to_string(ron.attempted) + " searches failed; policy rows " +
              std::to_string(lines_on.size()) + " limited vs " + std::to_string(lines_off.size()) +
              " unlimited (report " + std::to_string(ron.policy_rows) + "/" + std::to_string(roff.policy_rows) +
              ")" + (subset ? "" : "; not a subset") + (only_proved ? "" : "; rows from a failed search")};
}

Line determinism() {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string base = std::string(TABCOP_EXE) + " loop " + kCorpus.string() + " --iterations 2 --config " +
                           (kSource / "default.ini").string() + " --out ";
  for (const fs::path& out : {a, b}) {
    if (std::system((base + out.string() + " > /dev/null").c_str()) != 0) return {false, "loop run failed"};
  }
  std::size_t compared = 0;
  std::vector<std::string> differ;
  for (const char* it : {"iter0", "iter1"}) {
    for (const char* f : {"report.tsv", "value.model", "policy.model"}) {
      const fs::path rel = fs::path(it) / f;
      ++compared;
      if (!fs::exists(a / rel) || slurp(a / rel) != slurp(b / rel)) differ.push_back(rel.string());
    }
  }
  std::string detail = std::to_string(compared - differ.size()) + "/" + std::to_string(compared) + " files identical";
  for (const auto& d : differ) detail += "; differs: " + d;
  return {differ.empty(), detail};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Line()>>> criteria = {
      {"unification oracle equivalence", unification},
      {"closed forms and softmax", closed_forms},
      {"mcts invariants and uct argmax", mcts_invariants},
      {"training data contracts", training_contracts},
      {"learner", learner},
      {"checker", checker},
      {"e2e (a) iteration 0 coverage", iteration0_coverage},
      {"e2e (b) rewriting shortens eq_chain_16", rewriting_shortens},
      {"e2e (c) retrained guidance at reduced budget", learning_helps},
      {"e2e (d) limited policy subset", limited_policy},
      {"determinism", determinism},
  };
  const auto t0 = std::chrono::steady_clock::now();
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t = std::chrono::steady_clock::now();
    Line o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << fmt(" [%.1f s]", seconds_since(t))
              << std::endl;
  }
  std::cout << (failures ? "FAIL" : "PASS") << " acceptance: " << failures << " failing, "
            << fmt("%.1f s total", seconds_since(t0)) << std::endl;
  return failures ? 1 : 0;
}
