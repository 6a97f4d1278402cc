#pragma once

// Gradient-boosted regression trees over sparse feature vectors, squared loss.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabcop/config.hpp"
#include "tabcop/features.hpp"

namespace tabcop {

class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Row {
  FeatureVector x;
  double y = 0;
  double w = 1;
};

struct Dataset {
  std::size_t dim = 0;
  std::vector<Row> rows;
};

// Rows whose feature vectors are identical are merged, keeping the largest
// target. Row order follows first occurrence.
void dedupe_max(std::vector<Row>& rows);

// Dataset file: `target idx:val ...` per line, `#` comments.
void write_dataset(std::ostream& out, const Dataset& d);
Dataset read_dataset(std::istream& in, std::size_t dim);
void save_dataset(const std::string& path, const Dataset& d);
Dataset load_dataset(const std::string& path, std::size_t dim);

struct TreeNode {
  bool leaf = true;
  std::uint32_t feature = 0;
  double threshold = 0;
  bool default_left = false;
  double weight = 0;
  int left = -1;
  int right = -1;
};

struct Tree {
  std::vector<TreeNode> nodes; // nodes[0] is the root

  double leaf_value(const FeatureVector& x) const;
};

// A split as chosen by the learner: present values < threshold go left,
// missing values follow default_left.
struct Split {
  std::uint32_t feature = 0;
  double threshold = 0;
  bool default_left = false;
  double gain = 0;
};

class GbtModel {
public:
  std::size_t dim = 0;
  double eta = 0.3;
  double base = 0;
  std::vector<Tree> trees;

  // Throws ModelError if x.dim differs from dim.
  double predict(const FeatureVector& x) const;

  void save(std::ostream& out) const;
  static GbtModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static GbtModel load_file(const std::string& path);
};

struct TrainLog {
  std::vector<double> train_rmse;   // after each round, weighted, training split
  std::vector<double> holdout_rmse; // empty when there is no holdout
  std::size_t best_round = 0;       // number of trees kept
  std::vector<Split> root_splits;   // first split of every round's tree
};

// Throws ModelError on an empty dataset.
GbtModel train(const Dataset& data, const LearnerParams& params, std::uint64_t seed,
               TrainLog* log = nullptr);

// Grows one tree by exact greedy search over the rows `idx`, with gradients
// g and hessians h indexed like `rows`. Leaf weights are -G/(H+lambda),
// unscaled by the learning rate.
Tree fit_tree(const std::vector<Row>& rows, const std::vector<std::size_t>& idx,
              const std::vector<double>& g, const std::vector<double>& h, double lambda,
              std::size_t max_depth);

} // namespace tabcop
