#include "tabcop/guidance.hpp"

#include <algorithm>
#include <cmath>

namespace tabcop {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double default_value(std::size_t t) {
  return 1.0 / (1.0 + std::exp(-3.7 * std::exp(-0.05 * static_cast<double>(t)) + 2.5));
}

std::vector<double> default_policy(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

double value_target(std::optional<std::size_t> k, double discount) {
  if (!k) return -kValueClip;
  const double v = std::pow(discount, static_cast<double>(*k));
  if (v >= 1.0) return kValueClip;
  return std::clamp(std::log(v / (1.0 - v)), -kValueClip, kValueClip);
}

double value_from_prediction(double vp, std::size_t open_goals) {
  return std::pow(std::sqrt(sigmoid(vp)), static_cast<double>(open_goals));
}

double policy_target(double parent_visits, double child_visits, std::size_t action_count) {
  return std::max(kPolicyClip,
                  std::log(child_visits / parent_visits * static_cast<double>(action_count)));
}

std::vector<double> priors_from_predictions(std::span<const double> scores, double temperature) {
  const double mx = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out;
  out.reserve(scores.size());
  double z = 0;
  for (double s : scores) {
    out.push_back(std::exp((s - mx) / temperature));
    z += out.back();
  }
  for (double& p : out) p /= z;
  return out;
}

double DefaultGuidance::value(const ProverState& s) {
  return default_value(term_stats(s.goal).total_size);
}

std::vector<double> DefaultGuidance::priors(const ProverState& s) {
  return default_policy(s.actions.size());
}

ModelGuidance::ModelGuidance(const Calculus& calc, const GbtModel& value_model,
                             const GbtModel& policy_model, double temperature)
    : features_(calc, value_model.dim), value_model_(value_model), policy_model_(policy_model),
      temperature_(temperature) {
  if (policy_model.dim != value_model.dim) {
    throw ModelError("value and policy models disagree on the feature dimension");
  }
}

double ModelGuidance::value(const ProverState& s) {
  return value_from_prediction(value_model_.predict(features_.state_features(s)), s.goal.size());
}

std::vector<double> ModelGuidance::priors(const ProverState& s) {
  std::vector<double> scores;
  scores.reserve(s.actions.size());
  for (std::size_t i = 0; i < s.actions.size(); ++i) {
    scores.push_back(policy_model_.predict(features_.action_features(s, i)));
  }
  return priors_from_predictions(scores, temperature_);
}

} // namespace tabcop
