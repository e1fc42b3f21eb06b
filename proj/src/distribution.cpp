// Copyright 2026 The pdsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pdsynth/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "pdsynth/errors.hpp"
#include "pdsynth/logging.hpp"

namespace pdsynth {

std::string to_json(const RawDistribution& raw) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (const auto& [label, weight] : raw.entries) obj[label] = weight;
  return obj.dump();
}

CategoricalDistribution::CategoricalDistribution(std::vector<std::string> categories,
                                                 std::vector<double> probs)
    : categories_(std::move(categories)), probs_(std::move(probs)) {
  if (categories_.empty() || categories_.size() != probs_.size()) {
    throw ValidationError("distribution needs one probability per category");
  }
  cumulative_.reserve(probs_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!std::isfinite(probs_[i]) || probs_[i] < 0.0) throw InvalidWeight(categories_[i], probs_[i]);
    total += probs_[i];
    cumulative_.push_back(total);
    if (probs_[i] > 0.0) last_positive_ = i;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw ValidationError("probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

double CategoricalDistribution::prob(std::string_view label) const {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i] == label) return probs_[i];
  }
  throw UnknownCategory(std::string(label));
}

std::size_t CategoricalDistribution::index_for(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return last_positive_;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t stream_index) {
  std::uint64_t z = base_seed ^ stream_index;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::vector<double> aligned_weights(const RawDistribution& raw, const FeatureSpec& spec) {
  std::vector<double> weights(spec.categories.size(), 0.0);
  std::set<std::size_t> seen;
  for (const auto& [label, weight] : raw.entries) {
    auto index = spec.category_index(label);
    if (!index) throw UnknownCategory(label);
    if (!seen.insert(*index).second) throw DuplicateCategory(label);
    if (!std::isfinite(weight) || weight < 0.0) throw InvalidWeight(label, weight);
    weights[*index] = weight;
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateDistribution();
  return weights;
}

}  // namespace

void check_raw_distribution(const RawDistribution& raw, const FeatureSpec& spec) {
  aligned_weights(raw, spec);
}

CategoricalDistribution validate_and_normalize(const RawDistribution& raw, const FeatureSpec& spec) {
  std::vector<double> weights = aligned_weights(raw, spec);
  double total = 0.0;
  for (double w : weights) total += w;
  if (total < 0.5 || total > 1.5) {
    warn("feature '" + spec.name + "': raw probabilities sum to " + std::to_string(total) +
         "; renormalizing");
  }
  for (double& w : weights) w /= total;
  return CategoricalDistribution(spec.categories, std::move(weights));
}

std::size_t sample_index(const CategoricalDistribution& dist, Rng& rng) {
  return dist.index_for(rng.next_uniform());
}

const std::string& sample(const CategoricalDistribution& dist, Rng& rng) {
  return dist.categories()[sample_index(dist, rng)];
}

std::vector<std::uint64_t> sample_counts(const CategoricalDistribution& dist, std::uint64_t n,
                                         Rng& rng) {
  std::vector<std::uint64_t> counts(dist.size(), 0);
  for (std::uint64_t i = 0; i < n; ++i) ++counts[sample_index(dist, rng)];
  return counts;
}

std::int64_t realize_numeric_range(std::string_view label, const FeatureSpec& spec, Rng& rng) {
  const RangeBounds bounds = parse_range_label(label, spec.cap);
  const auto span = static_cast<std::uint64_t>(bounds.hi - bounds.lo) + 1;
  auto offset = static_cast<std::uint64_t>(rng.next_uniform() * static_cast<double>(span));
  offset = std::min(offset, span - 1);
  return bounds.lo + static_cast<std::int64_t>(offset);
}

}  // namespace pdsynth
