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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geotweet/country.hpp"
#include "geotweet/features.hpp"

namespace geotweet {

// Counting Naive Bayes over categorical tweet features.
//
//   score(c) = log P(c) + sum_{(k,v) in fv, v in V_k} log((n(c,k,v) + a) / (n(c,k) + a|V_k|))
//
// Values never seen in training (for any class) are skipped for all classes.
// With a = 0 a zero count drives a class to -inf; if every class ends at
// -inf the ranking falls back to the prior alone. Scores within a relative
// 1e-9 of each other are ties; ties rank the smaller alpha-2 code first.

struct ModelOptions {
  double alpha = 1.0;
  KindSet enabled_kinds = KindSet::all();
  bool uniform_priors = false;
  // Recorded so classification normalizes features the way training did.
  bool fold_case = true;

  friend bool operator==(const ModelOptions&, const ModelOptions&) = default;
};

struct LabeledFeatures {
  FeatureVector features;
  CountryLabel label;
};

using ValueCounts = std::map<std::string, std::int64_t, std::less<>>;
using Vocabulary = std::set<std::string, std::less<>>;

struct KindCounts {
  std::int64_t total = 0;
  ValueCounts values;

  friend bool operator==(const KindCounts&, const KindCounts&) = default;
};

struct ClassCounts {
  std::int64_t examples = 0;
  std::array<KindCounts, kFeatureKindCount> kinds;

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

class NaiveBayesModel {
 public:
  using ClassTable = std::map<CountryLabel, ClassCounts>;

  /// Validates every count invariant; throws CorruptModel on violation.
  NaiveBayesModel(ClassTable classes, std::array<Vocabulary, kFeatureKindCount> vocabulary, ModelOptions options);

  const ClassTable& classes() const noexcept { return classes_; }
  std::size_t num_classes() const noexcept { return classes_.size(); }
  std::int64_t total_examples() const noexcept { return total_examples_; }

  std::int64_t class_count(const CountryLabel& label) const;
  std::int64_t value_count(const CountryLabel& label, FeatureKind kind, std::string_view value) const;
  std::int64_t kind_total(const CountryLabel& label, FeatureKind kind) const;
  const Vocabulary& vocabulary(FeatureKind kind) const { return vocabulary_[index_of(kind)]; }

  const ModelOptions& options() const noexcept { return options_; }
  double alpha() const noexcept { return options_.alpha; }
  const KindSet& enabled_kinds() const noexcept { return options_.enabled_kinds; }

  /// True when the entry takes part in scoring (enabled kind, in vocabulary).
  bool scores(FeatureKind kind, std::string_view value) const;

  friend bool operator==(const NaiveBayesModel&, const NaiveBayesModel&) = default;

 private:
  ClassTable classes_;
  std::array<Vocabulary, kFeatureKindCount> vocabulary_;
  ModelOptions options_;
  std::int64_t total_examples_ = 0;
};

/// Single-writer accumulator. Shards built independently can be merged.
class ModelBuilder {
 public:
  explicit ModelBuilder(ModelOptions options = {});

  /// One class increment per example, one value increment per enabled entry.
  /// Entries of disabled kinds are dropped and counted in ignored_entries().
  void add(const FeatureVector& features, const CountryLabel& label);
  void merge(const ModelBuilder& other);

  std::int64_t examples() const noexcept { return examples_; }
  std::int64_t ignored_entries() const noexcept { return ignored_entries_; }

  /// Throws EmptyTrainingSet when nothing was added.
  NaiveBayesModel build() const;

 private:
  ModelOptions options_;
  NaiveBayesModel::ClassTable classes_;
  std::int64_t examples_ = 0;
  std::int64_t ignored_entries_ = 0;
};

/// Throws EmptyTrainingSet for an empty span. Notes about ignored entries
/// are appended to `diagnostics` when provided.
NaiveBayesModel train(std::span<const LabeledFeatures> examples, const ModelOptions& options = {},
                      std::vector<std::string>* diagnostics = nullptr);

/// Count-wise sum of two models trained with identical options.
NaiveBayesModel merge(const NaiveBayesModel& a, const NaiveBayesModel& b);

struct ScoredClass {
  CountryLabel label;
  double log_score;
};

/// Every class, best first.
std::vector<ScoredClass> log_posterior(const NaiveBayesModel& model, const FeatureVector& features);
CountryLabel classify(const NaiveBayesModel& model, const FeatureVector& features);

inline constexpr int kModelSchemaVersion = 1;

/// Versioned JSON document; `config` (if any) is embedded verbatim under
/// "config" and ignored on load.
nlohmann::json model_to_json(const NaiveBayesModel& model, const nlohmann::json& config = nullptr);
NaiveBayesModel model_from_json(const nlohmann::json& document);

void save_model(const NaiveBayesModel& model, const std::filesystem::path& path,
                const nlohmann::json& config = nullptr);
/// Throws CorruptModel on unreadable, truncated or invariant-violating files.
NaiveBayesModel load_model(const std::filesystem::path& path);

}  // namespace geotweet
