#pragma once

// Run configuration. Files are ini-style `key = value` lines with `#` or `;`
// comments and an optional single section header; unknown keys are errors.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tabcop {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct LearnerParams {
  double eta = 0.3;
  std::size_t max_depth = 9;
  double lambda = 1.5;
  std::size_t rounds = 400;
  std::size_t patience = 50;
  bool sign_balance = true;
};

struct Config {
  // search budgets
  std::size_t inference_limit = 200000;
  double time_limit_s = 200.0;
  std::size_t bigstep_freq = 2000;
  double cp_initial = 3.0;
  double cp_later = 2.0;

  // features and guidance
  std::size_t feature_dim = 10000;
  double discount = 0.99;
  double temperature = 2.0;

  // calculus
  std::size_t path_limit = 1000;
  bool rewrite = false;
  bool guided_reduction = false;
  // Unset means "opposite of guided_reduction".
  std::optional<bool> eager_reduction;
  bool single_action_optim = true;
  bool equality_axioms = true;

  // training data
  bool limited_policy = true;
  bool all_proofsteps = true;

  LearnerParams learner;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  // Guided reduction forces eager reduction off.
  bool eager_reduction_effective() const {
    if (guided_reduction) return false;
    return eager_reduction.value_or(true);
  }

  // Sets one key from its textual value; throws ConfigError.
  void set(std::string_view key, std::string_view value);
};

Config parse_config(std::string_view text);
Config load_config(const std::string& path);
// Every key, one per line, in a form parse_config accepts.
std::string print_config(const Config& cfg);

} // namespace tabcop
