#include "tabcop/mcts.hpp"

#include <cmath>
#include <set>

namespace tabcop {

double uct_score(double reward, double visits, double prior, double parent_visits, double cp) {
  return reward / visits + cp * prior * std::sqrt(std::log(parent_visits) / visits);
}

double unexplored_score(double max_prior, double parent_visits, double cp) {
  return cp * max_prior * std::sqrt(std::log(parent_visits));
}

Search::Search(const Calculus& calc, Guidance& guidance, const Config& cfg, double cp)
    : calc_(calc), guidance_(guidance), cfg_(cfg), cp_(cp) {
  SearchNode root;
  const auto& starts = calc.matrix().start_ids;
  if (starts.empty()) {
    root.state.result = Result::failed;
  } else if (starts.size() == 1) {
    root.state = calc.initial_states().front();
  } else {
    root.state = calc.root_state();
  }
  inferences_ = root.state.inference_count;
  switch (root.state.result) {
  case Result::proved:
    root.initial_value = 1;
    proved_node_ = 0;
    break;
  case Result::failed:
    root.initial_value = 0;
    root.dead = true;
    break;
  case Result::open:
    root.initial_value = root.state.pre_start ? 0.5 : guidance.value(root.state);
    root.child_priors = guidance.priors(root.state);
    break;
  }
  root.reward = root.initial_value;
  root.children.assign(root.state.actions.size(), -1);
  nodes_.push_back(std::move(root));
  bigstep_nodes_.push_back(0);
}

int select_child(const std::vector<SearchNode>& nodes, int v, double cp) {
  const SearchNode& n = nodes[static_cast<std::size_t>(v)];
  const std::size_t count = n.children.size();
  double p_max = -1;
  for (std::size_t i = 0; i < count; ++i) {
    if (n.children[i] < 0) p_max = std::max(p_max, n.child_priors[i]);
  }
  int best = -1;
  double best_score = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const int c = n.children[i];
    if (c < 0) continue;
    const SearchNode& ch = nodes[static_cast<std::size_t>(c)];
    if (ch.dead) continue;
    const double s = uct_score(ch.reward, ch.visits, ch.prior, n.visits, cp);
    if (best < 0 || s > best_score) {
      best = c;
      best_score = s;
    }
  }
  if (best < 0) return -1;
  if (p_max >= 0 && unexplored_score(p_max, n.visits, cp) > best_score) return -1;
  return best;
}

int best_mean_child(const std::vector<SearchNode>& nodes, int v) {
  int best = -1;
  double best_mean = 0, best_visits = 0;
  for (int c : nodes[static_cast<std::size_t>(v)].children) {
    if (c < 0) continue;
    const SearchNode& ch = nodes[static_cast<std::size_t>(c)];
    if (ch.dead) continue;
    const double mean = ch.reward / ch.visits;
    if (best < 0 || mean > best_mean || (mean == best_mean && ch.visits > best_visits)) {
      best = c;
      best_mean = mean;
      best_visits = ch.visits;
    }
  }
  return best;
}

int Search::select(int v) const {
  for (int c = select_child(nodes_, v, cp_); c >= 0; c = select_child(nodes_, v, cp_)) v = c;
  return v;
}

void Search::expand(int v) {
  std::size_t pick = 0;
  double best = -1;
  {
    const SearchNode& n = nodes_[static_cast<std::size_t>(v)];
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (n.children[i] < 0 && n.child_priors[i] > best) {
        best = n.child_priors[i];
        pick = i;
      }
    }
  }
  SearchNode child;
  child.state = calc_.apply_action(nodes_[static_cast<std::size_t>(v)].state, pick);
  child.parent = v;
  child.action_index = pick;
  child.prior = nodes_[static_cast<std::size_t>(v)].child_priors[pick];
  inferences_ += child.state.inference_count - nodes_[static_cast<std::size_t>(v)].state.inference_count;
  switch (child.state.result) {
  case Result::proved:
    child.initial_value = 1;
    break;
  case Result::failed:
    child.initial_value = 0;
    break;
  case Result::open:
    child.initial_value = guidance_.value(child.state);
    child.child_priors = guidance_.priors(child.state);
    break;
  }
  child.reward = child.initial_value;
  child.children.assign(child.state.actions.size(), -1);
  const Result result = child.state.result;
  const double value = child.initial_value;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(child));
  SearchNode& parent = nodes_[static_cast<std::size_t>(v)];
  parent.children[pick] = id;
  ++parent.expanded;
  backpropagate(v, value);
  if (result == Result::proved) proved_node_ = id;
  if (result == Result::failed) mark_dead(id);
}

void Search::backpropagate(int from, double reward) {
  for (int v = from; v >= 0; v = nodes_[static_cast<std::size_t>(v)].parent) {
    nodes_[static_cast<std::size_t>(v)].visits += 1;
    nodes_[static_cast<std::size_t>(v)].reward += reward;
  }
}

void Search::mark_dead(int x) {
  nodes_[static_cast<std::size_t>(x)].dead = true;
  for (int p = nodes_[static_cast<std::size_t>(x)].parent; p >= 0;
       p = nodes_[static_cast<std::size_t>(p)].parent) {
    SearchNode& n = nodes_[static_cast<std::size_t>(p)];
    if (n.expanded < n.children.size()) return;
    for (int c : n.children) {
      if (!nodes_[static_cast<std::size_t>(c)].dead) return;
    }
    n.dead = true;
  }
}

bool Search::playout() {
  if (proved_node_ >= 0 || nodes_[static_cast<std::size_t>(bigstep_root_)].dead) return false;
  expand(select(bigstep_root_));
  ++playouts_;
  return true;
}

void Search::bigstep() {
  const int best = best_mean_child(nodes_, bigstep_root_);
  if (best < 0) return;
  bigstep_root_ = best;
  bigstep_nodes_.push_back(best);
}

SearchResult Search::run() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t freq = std::max<std::size_t>(1, cfg_.bigstep_freq);
  while (proved_node_ < 0 && inferences_ < cfg_.inference_limit) {
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - t0;
    if (spent.count() >= cfg_.time_limit_s) break;
    if (!playout()) break;
    if (proved_node_ < 0 && playouts_ % freq == 0) bigstep();
  }
  SearchResult r;
  r.inferences = inferences_;
  r.playouts = playouts_;
  r.bigsteps = bigstep_nodes_.size() - 1;
  r.nodes = nodes_.size();
  if (proved_node_ >= 0) {
    r.outcome = Outcome::proved;
    r.proof = calc_.proof_trace(nodes_[static_cast<std::size_t>(proved_node_)].state);
    r.proof_length = r.proof.size();
  }
  return r;
}

std::vector<int> Search::proof_path() const {
  std::vector<int> path;
  for (int v = proved_node_; v >= 0; v = nodes_[static_cast<std::size_t>(v)].parent) {
    path.push_back(v);
  }
  return {path.rbegin(), path.rend()};
}

TrainingData extract_training_data(const Search& search, FeatureExtractor& features,
                                   const Config& cfg) {
  TrainingData out;
  const auto& nodes = search.nodes();
  const bool proved = search.proved_node() >= 0;
  const std::vector<int> proof = search.proof_path();
  const std::set<int> on_proof(proof.begin(), proof.end());
  const std::size_t final_length =
      proved ? nodes[static_cast<std::size_t>(search.proved_node())].state.proof_length() : 0;

  std::vector<int> sources = search.bigstep_nodes();
  if (cfg.all_proofsteps) {
    const std::set<int> seen(sources.begin(), sources.end());
    for (int v : proof) {
      if (!seen.count(v)) sources.push_back(v);
    }
  }

  for (int v : sources) {
    const SearchNode& n = nodes[static_cast<std::size_t>(v)];
    if (n.state.pre_start) continue;
    std::optional<std::size_t> k;
    if (on_proof.count(v)) k = final_length - n.state.proof_length();
    out.value.push_back(Row{features.state_features(n.state), value_target(k, cfg.discount), 1.0});
  }

  if (proved || !cfg.limited_policy) {
    for (int v : sources) {
      const SearchNode& n = nodes[static_cast<std::size_t>(v)];
      const double total = n.visits - 1;
      if (n.expanded == 0 || total <= 0) continue;
      for (std::size_t j = 0; j < n.children.size(); ++j) {
        const int c = n.children[j];
        if (c < 0) continue;
        const double nj = nodes[static_cast<std::size_t>(c)].visits;
        out.policy.push_back(Row{features.action_features(n.state, j),
                                 policy_target(total, nj, n.children.size()), 1.0});
      }
    }
  }
  dedupe_max(out.value);
  dedupe_max(out.policy);
  return out;
}

std::string stats_line(const std::string& name, const SearchResult& r) {
  return name + '\t' + (r.outcome == Outcome::proved ? "proved" : "exhausted") + '\t' +
         std::to_string(r.inferences) + '\t' + std::to_string(r.playouts) + '\t' +
         std::to_string(r.bigsteps) + '\t' + std::to_string(r.proof_length);
}

} // namespace tabcop
