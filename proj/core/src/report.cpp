// Copyright 2026 The geotweet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geotweet/report.hpp"

#include <ostream>

#include "geotweet/text.hpp"

namespace geotweet::report {
namespace {

using nlohmann::json;

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

json kinds_json(const KindSet& kinds) {
  json out = json::array();
  for (auto kind : kinds.kinds()) out.push_back(to_string(kind));
  return out;
}

std::string percent(const Rational& r) { return text::fixed(100.0 * r.value(), 2); }

}  // namespace

json rational_json(const Rational& r) {
  return {{"correct", r.numerator}, {"total", r.denominator}, {"value", r.value()}};
}

json cv_config_json(const CvConfig& config, const std::string& fold_fingerprint) {
  return {
      {"k", config.k},
      {"seed", config.seed},
      {"alpha", config.alpha},
      {"uniform_priors", config.uniform_priors},
      {"kinds", kinds_json(config.kinds)},
      {"fold_orientation", to_string(config.orientation)},
      {"fold_fingerprint", fold_fingerprint},
  };
}

json evaluation_json(const EvaluationReport& report, const json& run_config) {
  json doc;
  doc["report"] = "evaluation";
  doc["config"] = cv_config_json(report.config, report.fold_fingerprint);
  if (!run_config.is_null()) doc["config"]["run"] = run_config;
  doc["n_examples"] = report.n_examples;
  doc["accuracy"] = rational_json(report.overall);
  doc["mean_of_folds"] = report.mean_of_folds;

  json folds = json::array();
  for (const auto& fold : report.fold_accuracies) folds.push_back(rational_json(fold));
  doc["folds"] = std::move(folds);

  json rows = json::array();
  for (const auto& row : report.per_country) {
    rows.push_back({{"country", row.country.code()}, {"n", row.n}, {"correct", row.correct},
                    {"accuracy", row.accuracy().value()}});
  }
  doc["per_country"] = std::move(rows);

  json cells = json::array();
  for (const auto& [cell, n] : report.confusion.cells()) {
    cells.push_back({{"truth", cell.first.code()}, {"predicted", cell.second.code()}, {"count", n}});
  }
  doc["confusion"] = std::move(cells);
  return doc;
}

void write_evaluation_csv(std::ostream& out, const EvaluationReport& report) {
  out << "country,n_tweets,correct,accuracy\n";
  for (const auto& row : report.per_country) {
    out << row.country.code() << ',' << row.n << ',' << row.correct << ',' << text::fixed(row.accuracy().value(), 6)
        << '\n';
  }
  out << "ALL," << report.overall.denominator << ',' << report.overall.numerator << ','
      << text::fixed(report.overall.value(), 6) << '\n';
}

json ablation_json(std::span<const AblationRow> rows, const json& run_config) {
  json doc;
  doc["report"] = "ablation";
  if (!rows.empty()) {
    CvConfig echo = rows.front().report.config;
    doc["config"] = cv_config_json(echo, rows.front().report.fold_fingerprint);
    doc["config"].erase("kinds");
  }
  if (!run_config.is_null()) doc["config"]["run"] = run_config;
  json out = json::array();
  for (const auto& row : rows) {
    out.push_back({{"kinds", kinds_json(row.subset)},
                   {"accuracy", rational_json(row.report.overall)},
                   {"mean_of_folds", row.report.mean_of_folds},
                   {"fold_fingerprint", row.report.fold_fingerprint}});
  }
  doc["rows"] = std::move(out);
  return doc;
}

void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows) {
  for (auto kind : kAllFeatureKinds) out << to_string(kind) << ',';
  out << "correct,n,accuracy,mean_fold_accuracy\n";
  for (const auto& row : rows) {
    for (auto kind : kAllFeatureKinds) out << (row.subset.contains(kind) ? "x" : "") << ',';
    out << row.report.overall.numerator << ',' << row.report.overall.denominator << ','
        << text::fixed(row.report.overall.value(), 6) << ',' << text::fixed(row.report.mean_of_folds, 6) << '\n';
  }
}

json per_country_json(const PerCountryTable& table, const json& run_config) {
  json doc;
  doc["report"] = "per_country";
  doc["config"] = {{"min_count", table.min_count},
                   {"evaluation_mode", table.same_set ? "same_set" : "held_out"}};
  if (!run_config.is_null()) doc["config"]["run"] = run_config;

  json sets = json::array();
  for (const auto& kinds : table.kind_sets) sets.push_back(kinds_json(kinds));
  doc["kind_sets"] = std::move(sets);

  json rows = json::array();
  for (const auto& row : table.rows) {
    json accuracies = json::array();
    for (const auto& r : row.accuracy) accuracies.push_back(rational_json(r));
    rows.push_back({{"country", row.country.code()}, {"n", row.n}, {"accuracy", std::move(accuracies)}});
  }
  doc["rows"] = std::move(rows);
  doc["omitted_countries"] = table.omitted;
  doc["average_percent"] = table.average;
  doc["stddev_percent"] = table.stddev;
  if (table.region_name) {
    json region = json::array();
    for (const auto& r : table.region_accuracy) region.push_back(r ? rational_json(*r) : json(nullptr));
    doc["region"] = {{"name", *table.region_name}, {"accuracy", std::move(region)}};
  }
  return doc;
}

void write_per_country_csv(std::ostream& out, const PerCountryTable& table) {
  out << "country,n_tweets";
  for (const auto& kinds : table.kind_sets) out << ',' << csv_cell(kinds.to_string());
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.country.code() << ',' << row.n;
    for (const auto& r : row.accuracy) out << ',' << percent(r);
    out << '\n';
  }
  out << "Average,";
  for (double v : table.average) out << ',' << text::fixed(v, 2);
  out << "\nStandard deviation,";
  for (double v : table.stddev) out << ',' << text::fixed(v, 2);
  out << '\n';
  if (table.region_name) {
    std::string name = *table.region_name;
    if (!name.empty()) name.front() = text::ascii_upper(name.substr(0, 1)).front();
    out << csv_cell(name) << ',';
    for (const auto& r : table.region_accuracy) out << ',' << (r ? percent(*r) : std::string());
    out << '\n';
  }
}

}  // namespace geotweet::report
