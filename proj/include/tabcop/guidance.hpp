#pragma once

// Value and policy guidance for the search, and the maps between model
// outputs, search quantities and regression targets.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tabcop/calculus.hpp"
#include "tabcop/features.hpp"
#include "tabcop/gbt.hpp"

namespace tabcop {

inline constexpr double kValueClip = 3.0;
inline constexpr double kPolicyClip = -6.0;

double sigmoid(double x);

// t is the total term size of the open goals.
double default_value(std::size_t t);
std::vector<double> default_policy(std::size_t n);

// k steps to a proof, or nullopt for a failed node.
double value_target(std::optional<std::size_t> k, double discount = 0.99);
double value_from_prediction(double vp, std::size_t open_goals);
double policy_target(double parent_visits, double child_visits, std::size_t action_count);
std::vector<double> priors_from_predictions(std::span<const double> scores, double temperature);

class Guidance {
public:
  virtual ~Guidance() = default;
  // Value of an open state in (0,1].
  virtual double value(const ProverState& s) = 0;
  // One prior per action of s, summing to 1.
  virtual std::vector<double> priors(const ProverState& s) = 0;
};

class DefaultGuidance : public Guidance {
public:
  double value(const ProverState& s) override;
  std::vector<double> priors(const ProverState& s) override;
};

// Learned guidance; owns a per-worker feature cache, models are shared.
class ModelGuidance : public Guidance {
public:
  ModelGuidance(const Calculus& calc, const GbtModel& value_model, const GbtModel& policy_model,
                double temperature);

  double value(const ProverState& s) override;
  std::vector<double> priors(const ProverState& s) override;
  FeatureExtractor& extractor() { return features_; }

private:
  FeatureExtractor features_;
  const GbtModel& value_model_;
  const GbtModel& policy_model_;
  double temperature_;
};

} // namespace tabcop
