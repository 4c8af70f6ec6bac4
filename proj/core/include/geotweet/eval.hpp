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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geotweet/bayes.hpp"
#include "geotweet/country.hpp"
#include "geotweet/features.hpp"
#include "geotweet/tweet.hpp"

namespace geotweet {

// ---------------------------------------------------------------------------
// Accuracy
// ---------------------------------------------------------------------------

/// Exact T_same / T_n. Kept unreduced so the counts stay visible.
struct Rational {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  double value() const noexcept { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  std::string str() const { return std::to_string(numerator) + "/" + std::to_string(denominator); }

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.numerator * b.denominator == b.numerator * a.denominator;
  }
};

struct Prediction {
  CountryLabel predicted;
  CountryLabel truth;
};

/// Throws EmptyEvaluationSet for an empty span.
Rational accuracy(std::span<const Prediction> predictions);

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

struct FoldAssignment {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;  // per example, in [0, k)

  std::vector<std::size_t> sizes() const;
  std::vector<std::size_t> members(std::size_t fold) const;
  /// Hash of (k, seed, fold_of); equal fingerprints mean identical folds.
  std::string fingerprint() const;
};

/// Seeded Fisher-Yates shuffle (mt19937_64, rejection-sampled bounds, so the
/// result is identical on every platform), then round-robin assignment.
/// Throws InvalidFoldCount unless 2 <= k <= n.
FoldAssignment kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

// Standard trains on k-1 folds and tests on the held-out one. Inverted
// trains on a single fold and tests on the other k-1.
enum class FoldOrientation { Standard, Inverted };

std::string_view to_string(FoldOrientation orientation) noexcept;

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

struct LabeledTweet {
  TweetRecord tweet;
  CountryLabel label;
};

struct LabeledDataset {
  std::string source;
  std::vector<LabeledTweet> examples;
};

/// Feature extraction over a whole dataset, in order.
std::vector<LabeledFeatures> featurize(const LabeledDataset& data, const Geoparser& geoparser, const KindSet& kinds,
                                       const FeatureOptions& options = {},
                                       std::vector<std::string>* diagnostics = nullptr);

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

class ConfusionMatrix {
 public:
  void add(const CountryLabel& truth, const CountryLabel& predicted, std::int64_t n = 1);
  void merge(const ConfusionMatrix& other);

  std::int64_t count(const CountryLabel& truth, const CountryLabel& predicted) const;
  std::int64_t total() const noexcept { return total_; }
  std::int64_t diagonal() const noexcept { return diagonal_; }
  /// Union of true and predicted labels, sorted.
  std::vector<CountryLabel> labels() const;
  const std::map<std::pair<CountryLabel, CountryLabel>, std::int64_t>& cells() const noexcept { return cells_; }

 private:
  std::map<std::pair<CountryLabel, CountryLabel>, std::int64_t> cells_;
  std::int64_t total_ = 0;
  std::int64_t diagonal_ = 0;
};

struct CountryAccuracy {
  CountryLabel country;
  std::int64_t n = 0;
  std::int64_t correct = 0;

  Rational accuracy() const { return {correct, n}; }
};

/// Rows ordered by n descending, then by code.
std::vector<CountryAccuracy> per_class_accuracy(const ConfusionMatrix& confusion);

struct CvConfig {
  std::size_t k = 10;
  KindSet kinds = KindSet::all();
  double alpha = 1.0;
  bool uniform_priors = false;
  std::uint64_t seed = 1;
  FoldOrientation orientation = FoldOrientation::Standard;
  std::size_t jobs = 1;  // folds trained concurrently; results do not depend on it
};

struct EvaluationReport {
  Rational overall;                      // pooled over every prediction
  double mean_of_folds = 0.0;            // unweighted mean of fold accuracies
  std::vector<Rational> fold_accuracies;
  ConfusionMatrix confusion;
  std::vector<CountryAccuracy> per_country;
  std::size_t n_examples = 0;
  CvConfig config;
  std::string fold_fingerprint;
};

/// Throws InvalidFoldCount (k out of range) or InvalidDataset (< 2 classes).
EvaluationReport cross_validate(std::span<const LabeledFeatures> data, const CvConfig& config);
EvaluationReport cross_validate(const LabeledDataset& data, const CvConfig& config, const Geoparser& geoparser,
                                const FeatureOptions& options = {});

struct AblationRow {
  KindSet subset;
  EvaluationReport report;
};

/// One cross-validation per subset over identical folds, in the given order.
std::vector<AblationRow> ablate(std::span<const LabeledFeatures> data, std::span<const KindSet> subsets,
                                const CvConfig& base);

/// The 14 feature combinations of the `standard` ablation preset, in order.
std::vector<KindSet> ablation_preset();

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

/// Set of alpha-2 codes, one per line, '#' comments.
struct Region {
  std::string name;
  std::set<CountryLabel> members;
  std::string content_hash;  // fnv1a64 of the file bytes

  static Region load(const std::filesystem::path& path, std::string name = {});
  static Region parse(std::string_view content, std::string name);

  bool contains(const CountryLabel& label) const { return members.count(label) > 0; }
};

/// In-region labels unchanged, everything else becomes ZZ.
CountryLabel collapse_label(const CountryLabel& label, const Region& region);
std::vector<CountryLabel> collapse_region(std::span<const CountryLabel> labels, const Region& region);
std::vector<LabeledFeatures> collapse_region(std::span<const LabeledFeatures> data, const Region& region);

// ---------------------------------------------------------------------------
// Per-country report
// ---------------------------------------------------------------------------

struct SummaryStats {
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by N)
};

/// Throws InvalidArgument for an empty span.
SummaryStats summarize(std::span<const double> values);

struct PerCountryOptions {
  std::vector<KindSet> kind_sets;
  std::int64_t min_count = 15;
  double alpha = 1.0;
  bool uniform_priors = false;
  const Region* region = nullptr;  // enables the region aggregate row
  bool same_set = true;            // recorded in the report only
};

struct PerCountryTable {
  struct Row {
    CountryLabel country;
    std::int64_t n = 0;
    std::vector<Rational> accuracy;  // one per kind set
  };

  std::vector<KindSet> kind_sets;
  std::vector<Row> rows;                // n >= min_count, n desc then code
  std::vector<double> average;          // percent, unweighted over rows
  std::vector<double> stddev;           // percent, population
  std::optional<std::string> region_name;
  std::vector<std::optional<Rational>> region_accuracy;  // pooled over listed in-region rows
  std::int64_t min_count = 15;
  std::size_t omitted = 0;
  bool same_set = true;
};

/// Trains once per kind set on `train`, classifies `eval`, groups by true
/// country. Throws InvalidArgument if min_count < 1 or kind_sets is empty.
PerCountryTable per_country_report(std::span<const LabeledFeatures> train, std::span<const LabeledFeatures> eval,
                                   const PerCountryOptions& options);

// ---------------------------------------------------------------------------
// Error triage
// ---------------------------------------------------------------------------

enum class Diagnostic { LimitedInformation, BigClass, OovOnly };

std::string_view to_string(Diagnostic diagnostic) noexcept;

/// Heuristic tags for a classification. Empty when `truth` is given and the
/// prediction matches it. LIMITED_INFORMATION: at most one usable entry.
/// BIG_CLASS: the predicted class is the most frequent class of every
/// in-vocabulary entry. OOV_ONLY: entries exist but none is in vocabulary.
std::vector<Diagnostic> diagnose(const NaiveBayesModel& model, const FeatureVector& features,
                                 const std::optional<CountryLabel>& truth = std::nullopt);

}  // namespace geotweet
