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

#include "pdsynth/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "pdsynth/errors.hpp"
#include "pdsynth/table.hpp"

namespace pdsynth {

namespace {

FrequencyTable empty_table(std::optional<std::string> given, const FeatureSpec& target,
                           std::vector<std::string> contexts) {
  FrequencyTable t;
  t.given = std::move(given);
  t.target = target.name;
  t.contexts = std::move(contexts);
  t.categories = target.categories;
  t.counts.assign(t.contexts.size(), std::vector<std::uint64_t>(t.categories.size(), 0));
  t.support.assign(t.contexts.size(), 0);
  t.percent.assign(t.contexts.size(), std::vector<std::optional<double>>(t.categories.size()));
  return t;
}

void fill_percent(FrequencyTable& t) {
  for (std::size_t c = 0; c < t.contexts.size(); ++c) {
    if (t.support[c] == 0) continue;
    for (std::size_t k = 0; k < t.categories.size(); ++k) {
      t.percent[c][k] =
          100.0 * static_cast<double>(t.counts[c][k]) / static_cast<double>(t.support[c]);
    }
  }
}

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

// Code points, so "±" counts as one column.
std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  const std::size_t w = display_width(s);
  if (w < width) out.append(width - w, ' ');
  return out;
}

std::string render_grid(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], display_width(row[i]));
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i > 0) line += " | ";
      line += pad(rows[r][i], widths[i]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t i = 0; i < widths.size(); ++i) total += widths[i] + (i > 0 ? 3 : 0);
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

std::string aggregate_cell(const CellAggregate& a) {
  if (a.present == 0) return "-";
  return fmt("%.1f", a.mean) + " ± " + fmt("%.1f", a.stddev);
}

void check_layout(const FrequencyTable& reference, const RunAggregate& aggregate) {
  if (reference.target != aggregate.target || reference.given != aggregate.given ||
      reference.contexts != aggregate.contexts || reference.categories != aggregate.categories) {
    throw ShapeMismatch("aggregate layout does not match the reference table");
  }
}

}  // namespace

std::uint64_t FrequencyTable::valid_rows() const {
  return std::accumulate(support.begin(), support.end(), std::uint64_t{0});
}

std::optional<CategoricalDistribution> FrequencyTable::row_distribution(std::size_t context) const {
  std::vector<double> probs;
  double total = 0.0;
  for (const auto& v : percent[context]) {
    if (!v) return std::nullopt;
    probs.push_back(*v);
    total += *v;
  }
  if (!(total > 0.0)) return std::nullopt;
  for (double& p : probs) p /= total;
  return CategoricalDistribution(categories, std::move(probs));
}

FrequencyTable conditional_frequencies(const Table& table, std::string_view target,
                                       std::string_view given) {
  const auto& schema = table.schema();
  const auto target_index = schema.feature_index(target);
  if (!target_index) throw UnknownFeature(std::string(target));
  const auto given_index = schema.feature_index(given);
  if (!given_index) throw UnknownFeature(std::string(given));

  const FeatureSpec& given_spec = schema.features[*given_index];
  FrequencyTable t =
      empty_table(given_spec.name, schema.features[*target_index], given_spec.categories);
  const auto& target_col = table.column(*target_index);
  const auto& given_col = table.column(*given_index);
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    if (target_col[r] == Table::kInvalid || given_col[r] == Table::kInvalid) {
      ++t.invalid_rows;
      continue;
    }
    const auto c = static_cast<std::size_t>(given_col[r]);
    ++t.counts[c][static_cast<std::size_t>(target_col[r])];
    ++t.support[c];
  }
  fill_percent(t);
  return t;
}

FrequencyTable marginal_frequencies(const Table& table, std::string_view target) {
  const auto& schema = table.schema();
  const auto target_index = schema.feature_index(target);
  if (!target_index) throw UnknownFeature(std::string(target));

  FrequencyTable t = empty_table(std::nullopt, schema.features[*target_index], {std::string(kAllRows)});
  for (std::int32_t code : table.column(*target_index)) {
    if (code == Table::kInvalid) {
      ++t.invalid_rows;
      continue;
    }
    ++t.counts[0][static_cast<std::size_t>(code)];
    ++t.support[0];
  }
  fill_percent(t);
  return t;
}

FrequencyTable reference_from_fixture(const FixtureData& fixture, const DatasetSchema& schema,
                                      std::string_view target, std::string_view given) {
  const FeatureSpec& target_spec = schema.feature(target);
  const FeatureSpec& given_spec = schema.feature(given);
  FrequencyTable t = empty_table(given_spec.name, target_spec, given_spec.categories);

  for (std::size_t c = 0; c < given_spec.categories.size(); ++c) {
    const FixtureEntry* match = nullptr;
    for (const auto& entry : fixture.entries) {
      if (entry.feature != target_spec.name ||
          !context_has_clause(entry.context, given_spec.name, given_spec.categories[c])) {
        continue;
      }
      if (match != nullptr) {
        throw ShapeMismatch("several reference entries for " + given_spec.name + " = " +
                            given_spec.categories[c]);
      }
      match = &entry;
    }
    if (match == nullptr) continue;
    const CategoricalDistribution dist = validate_and_normalize(match->distribution, target_spec);
    for (std::size_t k = 0; k < t.categories.size(); ++k) t.percent[c][k] = 100.0 * dist.probs()[k];
  }
  return t;
}

double total_variation(const CategoricalDistribution& p, const CategoricalDistribution& q) {
  if (p.size() != q.size()) throw CategoryMismatch("distributions have different category sets");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& label = p.categories()[i];
    double qi = 0.0;
    if (q.categories()[i] == label) {
      qi = q.probs()[i];
    } else {
      auto it = std::find(q.categories().begin(), q.categories().end(), label);
      if (it == q.categories().end()) {
        throw CategoryMismatch("category '" + label + "' missing from the second distribution");
      }
      qi = q.probs()[static_cast<std::size_t>(it - q.categories().begin())];
    }
    sum += std::abs(p.probs()[i] - qi);
  }
  return 0.5 * sum;
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               const CategoricalDistribution& expected, std::uint64_t n) {
  if (observed.size() != expected.size()) {
    throw CategoryMismatch("observed counts do not align with the expected categories");
  }
  ChiSquareResult result;
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double pooled_observed = 0.0;
  double pooled_expected = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = static_cast<double>(n) * expected.probs()[i];
    const auto o = static_cast<double>(observed[i]);
    if (e < 5.0) {
      result.pooled.push_back(expected.categories()[i]);
      pooled_observed += o;
      pooled_expected += e;
    } else {
      bins.emplace_back(o, e);
    }
  }
  if (!result.pooled.empty()) {
    if (pooled_expected >= 5.0) {
      bins.emplace_back(pooled_observed, pooled_expected);
      result.note = std::to_string(result.pooled.size()) + " category(ies) pooled into one bin";
    } else {
      result.pooled_bin_dropped = true;
      result.note = std::to_string(result.pooled.size()) +
                    " category(ies) with expected count < 5 left out";
    }
  }
  if (bins.size() < 2) throw AllPooled();

  for (const auto& [o, e] : bins) result.statistic += (o - e) * (o - e) / e;
  result.dof = static_cast<int>(bins.size()) - 1;
  const boost::math::chi_squared_distribution<double> dist(result.dof);
  result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  return result;
}

RunAggregate aggregate_runs(std::span<const FrequencyTable> tables) {
  if (tables.empty()) throw ShapeMismatch("no runs to aggregate");
  const FrequencyTable& first = tables.front();
  for (const auto& t : tables) {
    if (t.target != first.target || t.given != first.given || t.contexts != first.contexts ||
        t.categories != first.categories) {
      throw ShapeMismatch("frequency tables have different shapes");
    }
  }

  RunAggregate agg;
  agg.given = first.given;
  agg.target = first.target;
  agg.contexts = first.contexts;
  agg.categories = first.categories;
  agg.run_count = tables.size();
  agg.cells.assign(first.contexts.size(), std::vector<CellAggregate>(first.categories.size()));

  for (std::size_t c = 0; c < agg.contexts.size(); ++c) {
    for (std::size_t k = 0; k < agg.categories.size(); ++k) {
      CellAggregate& cell = agg.cells[c][k];
      double sum = 0.0;
      for (const auto& t : tables) {
        if (!t.percent[c][k]) continue;
        sum += *t.percent[c][k];
        ++cell.present;
      }
      if (cell.present == 0) continue;
      cell.mean = sum / static_cast<double>(cell.present);
      if (cell.present > 1) {
        double ss = 0.0;
        for (const auto& t : tables) {
          if (t.percent[c][k]) ss += (*t.percent[c][k] - cell.mean) * (*t.percent[c][k] - cell.mean);
        }
        cell.stddev = std::sqrt(ss / static_cast<double>(cell.present - 1));
      }
    }
  }

  double invalid = 0.0;
  for (const auto& t : tables) {
    const std::uint64_t all = t.valid_rows() + t.invalid_rows;
    if (all > 0) invalid += 100.0 * static_cast<double>(t.invalid_rows) / static_cast<double>(all);
  }
  agg.mean_invalid_percent = invalid / static_cast<double>(tables.size());
  return agg;
}

double mean_total_variation(const FrequencyTable& reference, const RunAggregate& aggregate) {
  check_layout(reference, aggregate);
  double sum = 0.0;
  std::size_t rows = 0;
  for (std::size_t c = 0; c < reference.contexts.size(); ++c) {
    auto ref = reference.row_distribution(c);
    if (!ref) continue;
    std::vector<double> probs;
    double total = 0.0;
    bool complete = true;
    for (const auto& cell : aggregate.cells[c]) {
      if (cell.present == 0) complete = false;
      probs.push_back(cell.mean);
      total += cell.mean;
    }
    if (!complete || !(total > 0.0)) continue;
    for (double& p : probs) p /= total;
    sum += total_variation(*ref, CategoricalDistribution(aggregate.categories, std::move(probs)));
    ++rows;
  }
  return rows == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(rows);
}

std::string format_percent(std::optional<double> value) {
  return value ? fmt("%.1f", *value) : "-";
}

ComparisonReport comparison_report(const FrequencyTable& reference, std::string_view reference_name,
                                   std::span<const StrategySummary> strategies) {
  for (const auto& s : strategies) {
    if (s.aggregate) check_layout(reference, *s.aggregate);
  }
  const std::string given = reference.given.value_or("Context");

  ComparisonReport report;
  std::string& text = report.text;
  text += "Composition of " + reference.target + " by " + given + " (%)\n";
  text += "reference: " + std::string(reference_name) + "\n\n";

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = {given, reference.target, "Reference"};
  for (const auto& s : strategies) {
    header.push_back(s.name + (s.aggregate ? " (" + std::to_string(s.aggregate->run_count) + " runs)" : ""));
  }
  grid.push_back(std::move(header));
  for (std::size_t c = 0; c < reference.contexts.size(); ++c) {
    for (std::size_t k = 0; k < reference.categories.size(); ++k) {
      std::vector<std::string> row = {k == 0 ? reference.contexts[c] : "", reference.categories[k],
                                      format_percent(reference.percent[c][k])};
      for (const auto& s : strategies) {
        row.push_back(s.aggregate ? aggregate_cell(s.aggregate->cells[c][k]) : "failed");
      }
      grid.push_back(std::move(row));
    }
  }
  text += render_grid(grid);

  text += "\nMean total variation vs reference (averaged over " + given + ")\n";
  for (const auto& s : strategies) {
    text += "  " + s.name + ": " +
            (s.aggregate ? fmt("%.4f", mean_total_variation(reference, *s.aggregate)) : "n/a") + "\n";
  }
  text += "\nInvalid labels (% of rows, mean over runs)\n";
  for (const auto& s : strategies) {
    text += "  " + s.name + ": " + (s.aggregate ? fmt("%.1f", s.aggregate->mean_invalid_percent) : "n/a") +
            "\n";
  }
  text += "\nOracle calls (total over runs)\n";
  for (const auto& s : strategies) {
    const auto per_run = [&](std::uint64_t v) {
      return s.runs == 0 ? std::string("0") : fmt("%.1f", static_cast<double>(v) / static_cast<double>(s.runs));
    };
    text += "  " + s.name + ": distribution_queries=" + std::to_string(s.calls.distribution_queries) +
            " (" + per_run(s.calls.distribution_queries) + "/run) cell_queries=" +
            std::to_string(s.calls.cell_queries) + " (" + per_run(s.calls.cell_queries) +
            "/run) table_queries=" + std::to_string(s.calls.table_queries) + " (" +
            per_run(s.calls.table_queries) + "/run) retries=" + std::to_string(s.calls.retries) +
            " cache_hits=" + std::to_string(s.calls.cache_hits) + "\n";
  }
  bool any_failed = false;
  for (const auto& s : strategies) any_failed = any_failed || s.failure.has_value();
  if (any_failed) {
    text += "\nFailed strategies\n";
    for (const auto& s : strategies) {
      if (s.failure) text += "  " + s.name + ": " + *s.failure + "\n";
    }
  }

  const std::string panel_header =
      csv_escape(given) + "," + csv_escape(reference.target) + ",percent,strategy\n";
  auto panel_rows = [&](const std::string& strategy, auto value_of) {
    std::string out = panel_header;
    for (std::size_t c = 0; c < reference.contexts.size(); ++c) {
      for (std::size_t k = 0; k < reference.categories.size(); ++k) {
        const std::optional<double> v = value_of(c, k);
        if (!v) continue;
        out += csv_escape(reference.contexts[c]) + "," + csv_escape(reference.categories[k]) + "," +
               fmt("%.6f", *v) + "," + csv_escape(strategy) + "\n";
      }
    }
    return out;
  };
  report.panels["panel_reference.csv"] =
      panel_rows("reference", [&](std::size_t c, std::size_t k) { return reference.percent[c][k]; });
  for (const auto& s : strategies) {
    if (!s.aggregate) continue;
    report.panels["panel_" + s.name + ".csv"] =
        panel_rows(s.name, [&](std::size_t c, std::size_t k) -> std::optional<double> {
          const CellAggregate& cell = s.aggregate->cells[c][k];
          if (cell.present == 0) return std::nullopt;
          return cell.mean;
        });
  }
  return report;
}

}  // namespace pdsynth
