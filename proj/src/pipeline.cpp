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

#include "pdsynth/pipeline.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <vector>

#include "pdsynth/errors.hpp"
#include "pdsynth/prompts.hpp"

namespace pdsynth {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kProbabilityDriven:
      return "probability-driven";
    case Strategy::kTableWide:
      return "table-wide";
    case Strategy::kCellByCell:
      return "cell-by-cell";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  for (Strategy s : {Strategy::kProbabilityDriven, Strategy::kTableWide, Strategy::kCellByCell}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

std::shared_ptr<const CategoricalDistribution> DistributionCache::find(const ContextKey& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : it->second;
}

std::shared_ptr<const CategoricalDistribution> DistributionCache::insert(const ContextKey& key,
                                                                         CategoricalDistribution dist) {
  std::lock_guard lock(mu_);
  auto [it, inserted] =
      entries_.try_emplace(key, std::make_shared<const CategoricalDistribution>(std::move(dist)));
  return it->second;
}

std::size_t DistributionCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

namespace {

void check_n(std::int64_t n) {
  if (n < 1) throw Error("requested row count must be at least 1, got " + std::to_string(n));
}

// Runs `jobs` with at most `width` in flight; results keep job order. The
// first failure (in job order) is rethrown after all jobs finish.
template <typename Result, typename Job>
std::vector<Result> run_bounded(std::size_t count, std::size_t width, Job job) {
  std::vector<Result> results(count);
  if (width <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = job(i);
    return results;
  }
  std::vector<std::exception_ptr> errors(count);
  for (std::size_t begin = 0; begin < count; begin += width) {
    const std::size_t end = std::min(count, begin + width);
    std::vector<std::future<void>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, [&, i] {
        try {
          results[i] = job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }));
    }
    for (auto& f : batch) f.get();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace

GenerationRun generate_probability_driven(const std::shared_ptr<const DatasetSchema>& schema,
                                          Oracle& oracle, std::int64_t n, std::uint64_t seed,
                                          const PipelineOptions& options,
                                          DistributionCache* shared_cache) {
  check_n(n);
  const auto rows = static_cast<std::size_t>(n);
  const auto& features = schema->features;
  auto log = std::make_shared<OracleCallLog>();
  DistributionCache local_cache;
  DistributionCache& cache = shared_cache != nullptr ? *shared_cache : local_cache;
  Rng rng(seed);

  // Distinct contexts, ids in order of first appearance among the rows.
  std::vector<Context> contexts = {Context{{}, options.seed_text}};
  std::vector<std::uint32_t> row_context(rows, 0);
  std::vector<std::vector<std::int32_t>> columns(features.size());
  std::vector<std::optional<std::vector<std::int64_t>>> realized(features.size());
  std::vector<std::vector<ProvenanceEntry>> provenance(features.size());
  std::vector<std::vector<std::uint32_t>> provenance_rows(features.size());

  for (std::size_t fi = 0; fi < features.size(); ++fi) {
    const FeatureSpec& feature = features[fi];
    const std::size_t num_contexts = contexts.size();

    std::vector<ProvenanceEntry> entries(num_contexts);
    for (std::size_t c = 0; c < num_contexts; ++c) {
      entries[c].context = render_context(contexts[c], *schema);
      entries[c].key = context_key(feature.name, entries[c].context);
    }

    std::vector<std::int32_t>& column = columns[fi];
    column.assign(rows, 0);

    if (!feature.single_category()) {
      std::vector<std::shared_ptr<const CategoricalDistribution>> dists(num_contexts);
      std::vector<std::size_t> misses;
      std::map<ContextKey, std::size_t> first_with_key;
      for (std::size_t c = 0; c < num_contexts; ++c) {
        if (auto hit = cache.find(entries[c].key)) {
          dists[c] = std::move(hit);
          log->append(CallRecord{PromptKind::kDistribution, feature.name, entries[c].key.hex(), 0,
                                 CallOutcome::kCacheHit, {}, {}});
        } else if (first_with_key.try_emplace(entries[c].key, c).second) {
          misses.push_back(c);
        }
      }

      auto fetched = run_bounded<std::shared_ptr<const CategoricalDistribution>>(
          misses.size(), options.fetch_concurrency, [&](std::size_t m) {
            const ProvenanceEntry& entry = entries[misses[m]];
            try {
              const Prompt prompt = build_distribution_prompt(feature, entry.context, *schema);
              QueryOptions q{options.retry, options.distribution_temperature, feature.name,
                             entry.context, 0};
              RawDistribution raw = query_distribution(oracle, prompt, feature, q, *log);
              return cache.insert(entry.key, validate_and_normalize(raw, feature));
            } catch (const std::exception& e) {
              throw GenerationError(feature.name, entry.context, e.what());
            }
          });
      for (std::size_t m = 0; m < misses.size(); ++m) dists[misses[m]] = std::move(fetched[m]);
      for (std::size_t c = 0; c < num_contexts; ++c) {
        if (!dists[c]) {
          dists[c] = cache.find(entries[c].key);
          if (!dists[c]) dists[c] = dists[first_with_key.at(entries[c].key)];
        }
      }

      const bool numeric = feature.kind == FeatureKind::kNumericRange;
      if (numeric) realized[fi].emplace(rows, 0);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto code = static_cast<std::int32_t>(sample_index(*dists[row_context[r]], rng));
        column[r] = code;
        if (numeric) {
          (*realized[fi])[r] =
              realize_numeric_range(feature.categories[static_cast<std::size_t>(code)], feature, rng);
        }
      }
    } else if (feature.kind == FeatureKind::kNumericRange) {
      realized[fi].emplace(rows, 0);
      for (std::size_t r = 0; r < rows; ++r) {
        (*realized[fi])[r] = realize_numeric_range(feature.categories.front(), feature, rng);
      }
    }

    provenance[fi] = std::move(entries);
    provenance_rows[fi] = row_context;

    // Extend every context with this feature's label.
    const std::size_t num_categories = feature.categories.size();
    std::vector<std::int64_t> next_id(num_contexts * num_categories, -1);
    std::vector<Context> next_contexts;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t slot = row_context[r] * num_categories + static_cast<std::size_t>(column[r]);
      if (next_id[slot] < 0) {
        Context extended = contexts[row_context[r]];
        extended.assignments.emplace_back(feature.name,
                                          feature.categories[static_cast<std::size_t>(column[r])]);
        next_id[slot] = static_cast<std::int64_t>(next_contexts.size());
        next_contexts.push_back(std::move(extended));
      }
      row_context[r] = static_cast<std::uint32_t>(next_id[slot]);
    }
    contexts = std::move(next_contexts);
  }

  Table table(schema, std::move(columns));
  for (std::size_t fi = 0; fi < features.size(); ++fi) {
    if (realized[fi]) table.set_realized(fi, std::move(*realized[fi]));
    table.set_provenance(fi, std::move(provenance[fi]), std::move(provenance_rows[fi]));
  }
  return GenerationRun{Strategy::kProbabilityDriven, seed, n, std::move(table), log,
                       cache.size(), 0, std::nullopt};
}

GenerationRun generate_table_wide(const std::shared_ptr<const DatasetSchema>& schema,
                                  Oracle& oracle, std::int64_t n, std::uint64_t seed,
                                  const PipelineOptions& options) {
  check_n(n);
  auto log = std::make_shared<OracleCallLog>();
  GenerationRun run{Strategy::kTableWide, seed, n, Table(schema), log, 0, 0, std::nullopt};
  const std::size_t width = schema->features.size();

  std::size_t calls = 0;
  while (static_cast<std::int64_t>(run.table.num_rows()) < n && calls < options.table_batch_cap) {
    const std::int64_t remaining = n - static_cast<std::int64_t>(run.table.num_rows());
    const Prompt prompt = build_table_prompt(*schema, remaining);
    QueryOptions q{options.retry, options.table_temperature, "", "", remaining};
    ++calls;
    Table part(schema);
    try {
      part = query_table(oracle, prompt, schema, q, *log);
    } catch (const OracleError& e) {
      if (run.table.num_rows() == 0) throw;
      run.error = std::string("table-wide batch failed after ") +
                  std::to_string(run.table.num_rows()) + " rows: " + e.what();
      return run;
    }
    std::vector<std::string> labels(width);
    for (std::size_t r = 0; r < part.num_rows(); ++r) {
      for (std::size_t c = 0; c < width; ++c) labels[c] = std::string(part.label(r, c));
      run.table.append_labels(labels);
    }
  }
  if (static_cast<std::int64_t>(run.table.num_rows()) < n) {
    run.error = "RowShortfall: received " + std::to_string(run.table.num_rows()) + " of " +
                std::to_string(n) + " rows after " + std::to_string(calls) + " call(s)";
  }
  return run;
}

GenerationRun generate_cell_by_cell(const std::shared_ptr<const DatasetSchema>& schema,
                                    Oracle& oracle, std::int64_t n, std::uint64_t seed,
                                    const PipelineOptions& options) {
  check_n(n);
  auto log = std::make_shared<OracleCallLog>();
  const auto& features = schema->features;

  // A row's codes, or nothing when one of its cells stayed unusable.
  auto generate_row = [&](std::size_t) -> std::optional<std::vector<std::int32_t>> {
    Context ctx{{}, options.seed_text};
    std::vector<std::int32_t> codes;
    codes.reserve(features.size());
    for (const auto& feature : features) {
      std::size_t index = 0;
      if (!feature.single_category()) {
        const std::string rendered = render_context(ctx, *schema);
        const Prompt prompt = build_cell_prompt(feature, rendered, *schema);
        QueryOptions q{options.retry, options.cell_temperature, feature.name, rendered, 0};
        try {
          index = *feature.category_index(query_cell(oracle, prompt, feature, q, *log));
        } catch (const NotACategory& e) {
          if (options.cell_abort_on_failure) throw GenerationError(feature.name, rendered, e.what());
          return std::nullopt;
        } catch (const OracleError& e) {
          throw GenerationError(feature.name, rendered, e.what());
        }
      }
      codes.push_back(static_cast<std::int32_t>(index));
      ctx.assignments.emplace_back(feature.name, feature.categories[index]);
    }
    return codes;
  };

  const std::size_t width =
      options.deterministic ? 1 : std::max<std::size_t>(1, options.cell_concurrency);
  auto rows = run_bounded<std::optional<std::vector<std::int32_t>>>(static_cast<std::size_t>(n),
                                                                     width, generate_row);

  GenerationRun run{Strategy::kCellByCell, seed, n, Table(schema), log, 0, 0, std::nullopt};
  for (const auto& row : rows) {
    if (row) {
      run.table.append_codes(*row);
    } else {
      ++run.failed_rows;
    }
  }
  return run;
}

}  // namespace pdsynth
