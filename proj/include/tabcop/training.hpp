#pragma once

// Data collection and retraining rounds over a directory of problems.
//
// out/iter<k>/ holds proofs/<name>.proof, the cumulative value.data and
// policy.data, the models trained on them and report.tsv.

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabcop/config.hpp"
#include "tabcop/gbt.hpp"
#include "tabcop/mcts.hpp"
#include "tabcop/problem.hpp"

namespace tabcop {

class CheckRejected : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Sorted *.p files of a directory; throws std::runtime_error if there are none.
std::vector<std::string> list_problems(const std::string& dir);

// The matrix the prover and the checker work on.
Matrix prepare_matrix(const Matrix& m, const Config& cfg);

struct Models {
  GbtModel value;
  GbtModel policy;
};

struct ProblemRun {
  std::string name;
  SearchResult result;
  TrainingData data;
};

// Searches one prepared matrix. Without models the default guidance is used.
ProblemRun search_problem(const std::string& name, const Matrix& prepared, const Config& cfg,
                          const Models* models, double cp, bool collect_data);

struct IterationReport {
  std::size_t iteration = 0;
  std::size_t attempted = 0;
  std::size_t proved = 0;
  std::size_t cumulative_proved = 0;
  std::size_t value_rows = 0;
  std::size_t policy_rows = 0;
  std::string value_model; // relative to the output directory
  std::string policy_model;
  double wall_s = 0;
  std::vector<std::string> stats; // one stats line per problem
};

// Report file contents; wall time is left out so reruns compare equal.
std::string format_report(const IterationReport& r);

// One round: search every problem, check and store the proofs, append the
// new rows to the previous iteration's datasets and retrain both models.
// `proved_so_far` collects the names of every problem proved so far.
IterationReport run_iteration(const std::string& problem_dir, const std::string& out_dir,
                              std::size_t k, const Config& cfg, const Models* models,
                              std::set<std::string>& proved_so_far);

std::vector<IterationReport> run_loop(const std::string& problem_dir, const std::string& out_dir,
                                      std::size_t iterations, const Config& cfg);

// Trains on a dataset after merging duplicate rows; an empty dataset gives a
// constant zero model.
GbtModel train_models_on(const Dataset& data, const Config& cfg, std::uint64_t seed);

} // namespace tabcop
