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

#ifndef PDSYNTH_DISTRIBUTION_HPP_
#define PDSYNTH_DISTRIBUTION_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdsynth/schema.hpp"

namespace pdsynth {

// Label -> weight pairs exactly as read from an untrusted response.
struct RawDistribution {
  std::vector<std::pair<std::string, double>> entries;

  friend bool operator==(const RawDistribution&, const RawDistribution&) = default;
};

// Serializes as a flat JSON object in entry order.
std::string to_json(const RawDistribution& raw);

// Validated probability vector over a feature's categories, in feature order.
class CategoricalDistribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  // Throws ValidationError unless probs are finite, non-negative, aligned with
  // `categories` and sum to 1 within kSumTolerance.
  CategoricalDistribution(std::vector<std::string> categories, std::vector<double> probs);

  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double prob(std::string_view label) const;

  // Index drawn for uniform `u` in [0, 1) by inverse CDF over category order.
  std::size_t index_for(double u) const;

 private:
  std::vector<std::string> categories_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

// Portable PRNG: std::mt19937_64 (output sequence fixed by the C++ standard)
// with uniforms built from the top 53 bits, so draws are bit-identical on
// every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }
  // Uniform in [0, 1).
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer applied to (base_seed XOR stream_index). Gives
// independent seeds for parallel sampling streams.
std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t stream_index);

// Policy: unknown label -> UnknownCategory; repeated label -> DuplicateCategory;
// negative or non-finite weight -> InvalidWeight; missing label -> weight 0;
// zero total -> DegenerateDistribution. Otherwise weights are divided by their
// sum. A raw total outside [0.5, 1.5] is still normalized but logs a warning.
CategoricalDistribution validate_and_normalize(const RawDistribution& raw, const FeatureSpec& spec);

// The error checks of validate_and_normalize alone, without logging.
void check_raw_distribution(const RawDistribution& raw, const FeatureSpec& spec);

// One uniform draw, inverse CDF over the distribution's category order.
std::size_t sample_index(const CategoricalDistribution& dist, Rng& rng);
const std::string& sample(const CategoricalDistribution& dist, Rng& rng);

// Equivalent to n calls of sample(); counts aligned with dist.categories().
std::vector<std::uint64_t> sample_counts(const CategoricalDistribution& dist, std::uint64_t n,
                                         Rng& rng);

// Uniform integer in the label's closed interval, one draw.
// Throws UnparsableRange.
std::int64_t realize_numeric_range(std::string_view label, const FeatureSpec& spec, Rng& rng);

}  // namespace pdsynth

#endif  // PDSYNTH_DISTRIBUTION_HPP_
