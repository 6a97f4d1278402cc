#pragma once

// Hashed sparse features of prover states and actions.

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tabcop/calculus.hpp"

namespace tabcop {

struct FeatureVector {
  // Sorted by index, no zero values.
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::size_t dim = 0;

  double get(std::uint32_t index) const;
  double sum() const;
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

using RawFeatures = std::vector<std::pair<std::string, double>>;

// What an action contributes to the policy features.
struct ActionView {
  std::string tag; // "ext", "red", "rew:LR", "rew:RL", "start"
  std::vector<Literal> literals;
};

RawFeatures raw_features(std::span<const Literal> goals, std::span<const Literal> path,
                         const ActionView* action = nullptr);
FeatureVector compress(const RawFeatures& raw, std::size_t dim);

// Appends all vertical walks of length 1..3 over `lit` as `prefix` tokens.
void literal_walks(const Literal& lit, const std::string& prefix, RawFeatures& out);

// Per-worker feature extractor with a cache keyed by (goals, path, action)
// up to variable renaming.
class FeatureExtractor {
public:
  FeatureExtractor(const Calculus& calc, std::size_t dim);

  FeatureVector state_features(const ProverState& s);
  FeatureVector action_features(const ProverState& s, std::size_t action_index);

  ActionView view(const ProverState& s, const Action& a) const;
  std::size_t dim() const { return dim_; }
  std::size_t cache_hits() const { return hits_; }
  std::size_t cache_size() const { return cache_size_; }
  void clear_cache();

private:
  struct Entry {
    std::string key;
    FeatureVector value;
  };

  const FeatureVector* lookup(std::uint64_t h, const std::string& key);
  void store(std::uint64_t h, std::string key, const FeatureVector& v);

  const Calculus& calc_;
  std::size_t dim_;
  std::unordered_map<std::uint64_t, std::vector<Entry>> cache_;
  std::size_t hits_ = 0;
  std::size_t cache_size_ = 0;
};

} // namespace tabcop
