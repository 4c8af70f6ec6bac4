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

#include "geotweet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include "geotweet/error.hpp"
#include "geotweet/text.hpp"

namespace geotweet {
namespace {

// Uniform integer in [0, bound) from a fully specified engine.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

// Runs fn(i) for i in [0, n) with at most `jobs` tasks alive; results by index.
template <typename Result, typename Fn>
std::vector<Result> run_indexed(std::size_t n, std::size_t jobs, Fn fn) {
  std::vector<Result> results(n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  for (std::size_t start = 0; start < n; start += jobs) {
    std::vector<std::future<Result>> batch;
    for (std::size_t i = start; i < std::min(n, start + jobs); ++i) {
      batch.push_back(std::async(std::launch::async, fn, i));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) results[start + i] = batch[i].get();
  }
  return results;
}

struct FoldResult {
  Rational accuracy;
  ConfusionMatrix confusion;
};

}  // namespace

Rational accuracy(std::span<const Prediction> predictions) {
  if (predictions.empty()) throw EmptyEvaluationSet("accuracy over an empty prediction list");
  std::int64_t same = 0;
  for (const auto& p : predictions) same += p.predicted == p.truth;
  return {same, static_cast<std::int64_t>(predictions.size())};
}

// -- folds -------------------------------------------------------------------

std::vector<std::size_t> FoldAssignment::sizes() const {
  std::vector<std::size_t> out(k, 0);
  for (auto fold : fold_of) ++out[fold];
  return out;
}

std::vector<std::size_t> FoldAssignment::members(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::string FoldAssignment::fingerprint() const {
  std::string bytes = std::to_string(k) + ":" + std::to_string(seed) + ":";
  for (auto fold : fold_of) bytes += std::to_string(fold) + ",";
  return text::hex64(text::fnv1a64(bytes));
}

FoldAssignment kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) {
    throw InvalidFoldCount("need 2 <= k <= n, got k=" + std::to_string(k) + " n=" + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[bounded(rng, i + 1)]);

  FoldAssignment assignment{k, seed, std::vector<std::size_t>(n)};
  for (std::size_t position = 0; position < n; ++position) assignment.fold_of[order[position]] = position % k;
  return assignment;
}

std::string_view to_string(FoldOrientation orientation) noexcept {
  return orientation == FoldOrientation::Inverted ? "inverted" : "standard";
}

// -- datasets ----------------------------------------------------------------

std::vector<LabeledFeatures> featurize(const LabeledDataset& data, const Geoparser& geoparser, const KindSet& kinds,
                                       const FeatureOptions& options, std::vector<std::string>* diagnostics) {
  std::vector<LabeledFeatures> out;
  out.reserve(data.examples.size());
  for (const auto& example : data.examples) {
    out.push_back({extract_features(example.tweet, geoparser, kinds, options, diagnostics), example.label});
  }
  return out;
}

// -- confusion ---------------------------------------------------------------

void ConfusionMatrix::add(const CountryLabel& truth, const CountryLabel& predicted, std::int64_t n) {
  cells_[{truth, predicted}] += n;
  total_ += n;
  if (truth == predicted) diagonal_ += n;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  for (const auto& [cell, n] : other.cells_) add(cell.first, cell.second, n);
}

std::int64_t ConfusionMatrix::count(const CountryLabel& truth, const CountryLabel& predicted) const {
  auto it = cells_.find({truth, predicted});
  return it == cells_.end() ? 0 : it->second;
}

std::vector<CountryLabel> ConfusionMatrix::labels() const {
  std::set<CountryLabel> seen;
  for (const auto& [cell, n] : cells_) {
    seen.insert(cell.first);
    seen.insert(cell.second);
  }
  return {seen.begin(), seen.end()};
}

std::vector<CountryAccuracy> per_class_accuracy(const ConfusionMatrix& confusion) {
  std::map<CountryLabel, CountryAccuracy> rows;
  for (const auto& [cell, n] : confusion.cells()) {
    auto& row = rows.try_emplace(cell.first, CountryAccuracy{cell.first}).first->second;
    row.n += n;
    if (cell.first == cell.second) row.correct += n;
  }
  std::vector<CountryAccuracy> out;
  for (auto& [label, row] : rows) out.push_back(row);
  std::stable_sort(out.begin(), out.end(), [](const CountryAccuracy& a, const CountryAccuracy& b) { return a.n > b.n; });
  return out;
}

// -- cross-validation --------------------------------------------------------

EvaluationReport cross_validate(std::span<const LabeledFeatures> data, const CvConfig& config) {
  const auto folds = kfold_split(data.size(), config.k, config.seed);
  std::set<CountryLabel> classes;
  for (const auto& example : data) classes.insert(example.label);
  if (classes.size() < 2) throw InvalidDataset("cross-validation needs at least 2 classes");

  ModelOptions model_options;
  model_options.alpha = config.alpha;
  model_options.enabled_kinds = config.kinds;
  model_options.uniform_priors = config.uniform_priors;

  const bool inverted = config.orientation == FoldOrientation::Inverted;
  auto run_fold = [&](std::size_t fold) {
    ModelBuilder builder(model_options);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const bool in_fold = folds.fold_of[i] == fold;
      if (in_fold == inverted) builder.add(data[i].features, data[i].label);
    }
    const NaiveBayesModel model = builder.build();

    FoldResult result;
    std::vector<Prediction> predictions;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const bool in_fold = folds.fold_of[i] == fold;
      if (in_fold == inverted) continue;
      const FeatureVector fv = data[i].features.restricted_to(config.kinds);
      const CountryLabel predicted = classify(model, fv);
      predictions.push_back({predicted, data[i].label});
      result.confusion.add(data[i].label, predicted);
    }
    result.accuracy = accuracy(predictions);
    return result;
  };

  auto results = run_indexed<FoldResult>(config.k, config.jobs, run_fold);

  EvaluationReport report;
  report.config = config;
  report.n_examples = data.size();
  report.fold_fingerprint = folds.fingerprint();
  double fold_sum = 0.0;
  for (auto& result : results) {
    report.fold_accuracies.push_back(result.accuracy);
    fold_sum += result.accuracy.value();
    report.confusion.merge(result.confusion);
  }
  report.mean_of_folds = fold_sum / static_cast<double>(config.k);
  report.overall = {report.confusion.diagonal(), report.confusion.total()};
  report.per_country = per_class_accuracy(report.confusion);
  return report;
}

EvaluationReport cross_validate(const LabeledDataset& data, const CvConfig& config, const Geoparser& geoparser,
                                const FeatureOptions& options) {
  if (config.k < 2 || config.k > data.examples.size()) {
    throw InvalidFoldCount("need 2 <= k <= n, got k=" + std::to_string(config.k) +
                           " n=" + std::to_string(data.examples.size()));
  }
  const auto features = featurize(data, geoparser, config.kinds, options);
  return cross_validate(features, config);
}

std::vector<AblationRow> ablate(std::span<const LabeledFeatures> data, std::span<const KindSet> subsets,
                                const CvConfig& base) {
  if (subsets.empty()) throw InvalidArgument("ablation needs at least one feature subset");
  std::vector<AblationRow> rows;
  rows.reserve(subsets.size());
  for (const KindSet& subset : subsets) {
    CvConfig config = base;
    config.kinds = subset;
    rows.push_back({subset, cross_validate(data, config)});
  }
  return rows;
}

std::vector<KindSet> ablation_preset() {
  using K = FeatureKind;
  return {
      {K::Location},
      {K::Timezone},
      {K::TweetLanguage},
      {K::Geoparsed},
      {K::UtcOffset},
      {K::UserLanguage},
      {K::Location, K::Geoparsed},
      {K::Location, K::Timezone},
      {K::Location, K::Timezone, K::TweetLanguage},
      {K::Timezone, K::Geoparsed},
      {K::TweetLanguage, K::Geoparsed},
      {K::Location, K::Timezone, K::TweetLanguage, K::Geoparsed},
      {K::Location, K::Timezone, K::Geoparsed},
      KindSet::all(),
  };
}

// -- regions -----------------------------------------------------------------

Region Region::load(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open region file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), name.empty() ? path.stem().string() : std::move(name));
}

Region Region::parse(std::string_view content, std::string name) {
  Region region;
  region.name = std::move(name);
  region.content_hash = text::hex64(text::fnv1a64(content));
  std::size_t line_no = 0;
  for (auto line : text::split(content, '\n')) {
    ++line_no;
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto label = CountryLabel::try_parse(line);
    if (!label || label->is_other()) {
      throw MalformedInput("region " + region.name + ": invalid code '" + std::string(line) + "'", line_no);
    }
    region.members.insert(*label);
  }
  if (region.members.empty()) throw InvalidArgument("region " + region.name + " is empty");
  return region;
}

CountryLabel collapse_label(const CountryLabel& label, const Region& region) {
  return region.contains(label) ? label : CountryLabel::other();
}

std::vector<CountryLabel> collapse_region(std::span<const CountryLabel> labels, const Region& region) {
  if (region.members.empty()) throw InvalidArgument("collapse_region: empty region");
  std::vector<CountryLabel> out;
  out.reserve(labels.size());
  for (const auto& label : labels) out.push_back(collapse_label(label, region));
  return out;
}

std::vector<LabeledFeatures> collapse_region(std::span<const LabeledFeatures> data, const Region& region) {
  if (region.members.empty()) throw InvalidArgument("collapse_region: empty region");
  std::vector<LabeledFeatures> out(data.begin(), data.end());
  for (auto& example : out) example.label = collapse_label(example.label, region);
  return out;
}

// -- per-country -------------------------------------------------------------

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("summarize: no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double squares = 0.0;
  for (double v : values) squares += (v - mean) * (v - mean);
  return {mean, std::sqrt(squares / static_cast<double>(values.size()))};
}

PerCountryTable per_country_report(std::span<const LabeledFeatures> train, std::span<const LabeledFeatures> eval,
                                   const PerCountryOptions& options) {
  if (options.min_count < 1) throw InvalidArgument("min_count must be >= 1");
  if (options.kind_sets.empty()) throw InvalidArgument("per-country report needs at least one kind set");
  if (eval.empty()) throw EmptyEvaluationSet("per-country report over an empty evaluation set");

  PerCountryTable table;
  table.kind_sets = options.kind_sets;
  table.min_count = options.min_count;
  table.same_set = options.same_set;

  std::vector<ConfusionMatrix> confusions;
  for (const KindSet& kinds : options.kind_sets) {
    ModelOptions model_options;
    model_options.alpha = options.alpha;
    model_options.uniform_priors = options.uniform_priors;
    model_options.enabled_kinds = kinds;
    const NaiveBayesModel model = geotweet::train(train, model_options);
    ConfusionMatrix confusion;
    for (const auto& example : eval) {
      confusion.add(example.label, classify(model, example.features.restricted_to(kinds)));
    }
    confusions.push_back(std::move(confusion));
  }

  // Row order and n come from the first kind set; every set sees the same eval data.
  for (const auto& country : per_class_accuracy(confusions.front())) {
    if (country.n < options.min_count) {
      ++table.omitted;
      continue;
    }
    PerCountryTable::Row row{country.country, country.n, {}};
    for (const auto& confusion : confusions) {
      row.accuracy.push_back({confusion.count(country.country, country.country), country.n});
    }
    table.rows.push_back(std::move(row));
  }

  for (std::size_t s = 0; s < options.kind_sets.size(); ++s) {
    std::vector<double> percents;
    for (const auto& row : table.rows) percents.push_back(100.0 * row.accuracy[s].value());
    if (percents.empty()) {
      table.average.push_back(0.0);
      table.stddev.push_back(0.0);
    } else {
      const auto stats = summarize(percents);
      table.average.push_back(stats.mean);
      table.stddev.push_back(stats.stddev);
    }
  }

  if (options.region != nullptr) {
    table.region_name = options.region->name;
    for (std::size_t s = 0; s < options.kind_sets.size(); ++s) {
      Rational pooled{0, 0};
      for (const auto& row : table.rows) {
        if (!options.region->contains(row.country)) continue;
        pooled.numerator += row.accuracy[s].numerator;
        pooled.denominator += row.accuracy[s].denominator;
      }
      table.region_accuracy.push_back(pooled.denominator > 0 ? std::optional<Rational>(pooled) : std::nullopt);
    }
  }
  return table;
}

// -- diagnostics -------------------------------------------------------------

std::string_view to_string(Diagnostic diagnostic) noexcept {
  switch (diagnostic) {
    case Diagnostic::LimitedInformation: return "LIMITED_INFORMATION";
    case Diagnostic::BigClass: return "BIG_CLASS";
    case Diagnostic::OovOnly: return "OOV_ONLY";
  }
  return "UNKNOWN";
}

std::vector<Diagnostic> diagnose(const NaiveBayesModel& model, const FeatureVector& features,
                                 const std::optional<CountryLabel>& truth) {
  const FeatureVector usable = features.restricted_to(model.enabled_kinds());
  const CountryLabel predicted = classify(model, usable);
  if (truth && *truth == predicted) return {};

  std::vector<Diagnostic> tags;
  if (usable.size() <= 1) tags.push_back(Diagnostic::LimitedInformation);

  std::size_t in_vocabulary = 0;
  bool predicted_dominates = true;
  usable.for_each([&](FeatureKind kind, const std::string& value) {
    if (!model.scores(kind, value)) return;
    ++in_vocabulary;
    const CountryLabel* majority = nullptr;
    std::int64_t best = 0;
    for (const auto& [label, counts] : model.classes()) {  // ascending code, so ties keep the smaller
      std::int64_t n = model.value_count(label, kind, value);
      if (n > best) {
        best = n;
        majority = &label;
      }
    }
    if (majority == nullptr || *majority != predicted) predicted_dominates = false;
  });
  if (in_vocabulary > 0 && predicted_dominates) tags.push_back(Diagnostic::BigClass);
  if (!usable.empty() && in_vocabulary == 0) tags.push_back(Diagnostic::OovOnly);
  return tags;
}

}  // namespace geotweet
