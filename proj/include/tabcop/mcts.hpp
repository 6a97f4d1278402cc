#pragma once

// Monte-Carlo tree search over prover states.

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tabcop/calculus.hpp"
#include "tabcop/features.hpp"
#include "tabcop/gbt.hpp"
#include "tabcop/guidance.hpp"

namespace tabcop {

double uct_score(double reward, double visits, double prior, double parent_visits, double cp);
// Score of the pool of unexpanded actions: value 0 and one virtual visit.
double unexplored_score(double max_prior, double parent_visits, double cp);

struct SearchNode {
  ProverState state;
  int parent = -1;
  std::size_t action_index = 0; // index in the parent's action list
  double prior = 1.0;
  double visits = 1;
  double reward = 0;
  double initial_value = 0;
  std::vector<double> child_priors;
  std::vector<int> children; // per action, -1 if unexpanded
  std::size_t expanded = 0;
  bool dead = false;
};

// Child of node v to descend into, or -1 when v itself should be expanded
// (no live child, or the unexpanded pool outscores every live child).
int select_child(const std::vector<SearchNode>& nodes, int v, double cp);
// Live child with the best mean reward; ties go to more visits, then the
// lower action index. -1 if there is none.
int best_mean_child(const std::vector<SearchNode>& nodes, int v);

enum class Outcome { proved, exhausted };

struct SearchResult {
  Outcome outcome = Outcome::exhausted;
  std::vector<std::string> proof;
  std::size_t inferences = 0;
  std::size_t playouts = 0;
  std::size_t bigsteps = 0;
  std::size_t proof_length = 0;
  std::size_t nodes = 0;
};

class Search {
public:
  Search(const Calculus& calc, Guidance& guidance, const Config& cfg, double cp);

  // Runs until a proof is found, a budget runs out or nothing is left to explore.
  SearchResult run();

  // One select-expand-backpropagate cycle. Returns false if no playout was
  // possible (bigstep root dead or already proved).
  bool playout();
  // Moves the bigstep root to its best live child; no-op without children.
  void bigstep();

  const std::vector<SearchNode>& nodes() const { return nodes_; }
  int root() const { return 0; }
  int bigstep_root() const { return bigstep_root_; }
  // Every node that has been a bigstep root, the initial root first.
  const std::vector<int>& bigstep_nodes() const { return bigstep_nodes_; }
  int proved_node() const { return proved_node_; }
  std::size_t inferences() const { return inferences_; }
  std::size_t playouts() const { return playouts_; }
  double cp() const { return cp_; }
  const Calculus& calculus() const { return calc_; }

  // Nodes from the root down to the proved node; empty if none.
  std::vector<int> proof_path() const;

private:
  int select(int from) const;
  void expand(int node);
  void backpropagate(int from, double reward);
  void mark_dead(int node);

  const Calculus& calc_;
  Guidance& guidance_;
  Config cfg_;
  double cp_;
  std::vector<SearchNode> nodes_;
  int bigstep_root_ = 0;
  std::vector<int> bigstep_nodes_;
  int proved_node_ = -1;
  std::size_t inferences_ = 0;
  std::size_t playouts_ = 0;
};

struct TrainingData {
  std::vector<Row> value;
  std::vector<Row> policy;
};

// Value and policy rows from a finished search; duplicates are merged.
TrainingData extract_training_data(const Search& search, FeatureExtractor& features,
                                   const Config& cfg);

std::string stats_line(const std::string& name, const SearchResult& r);

} // namespace tabcop
