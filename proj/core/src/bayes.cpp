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

#include "geotweet/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "geotweet/error.hpp"

namespace geotweet {
namespace {

using nlohmann::json;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::string_view kModelFormat = "geotweet.naive_bayes";

void require(bool condition, const std::string& what) {
  if (!condition) throw CorruptModel(what);
}

// Scores this close are equal up to rounding in the log sum.
constexpr double kTieTolerance = 1e-9;

bool ties(double a, double b) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::abs(a - b) <= kTieTolerance * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Descending score; each run of tied scores is ordered by code.
void rank(std::vector<ScoredClass>& ranked) {
  std::sort(ranked.begin(), ranked.end(), [](const ScoredClass& a, const ScoredClass& b) {
    if (a.log_score != b.log_score) return a.log_score > b.log_score;
    return a.label < b.label;
  });
  for (std::size_t begin = 0; begin < ranked.size();) {
    std::size_t end = begin + 1;
    while (end < ranked.size() && ties(ranked[begin].log_score, ranked[end].log_score)) ++end;
    std::sort(ranked.begin() + static_cast<std::ptrdiff_t>(begin), ranked.begin() + static_cast<std::ptrdiff_t>(end),
              [](const ScoredClass& a, const ScoredClass& b) { return a.label < b.label; });
    begin = end;
  }
}

}  // namespace

// -- NaiveBayesModel ---------------------------------------------------------

NaiveBayesModel::NaiveBayesModel(ClassTable classes, std::array<Vocabulary, kFeatureKindCount> vocabulary,
                                 ModelOptions options)
    : classes_(std::move(classes)), vocabulary_(std::move(vocabulary)), options_(std::move(options)) {
  require(std::isfinite(options_.alpha) && options_.alpha >= 0.0, "alpha must be finite and >= 0");
  require(!options_.enabled_kinds.empty(), "no enabled feature kinds");
  require(!classes_.empty(), "model has no classes");

  std::array<Vocabulary, kFeatureKindCount> seen;
  for (const auto& [label, counts] : classes_) {
    require(counts.examples >= 1, "class " + label.code() + " has no examples");
    total_examples_ += counts.examples;
    for (auto kind : kAllFeatureKinds) {
      const KindCounts& kc = counts.kinds[index_of(kind)];
      std::int64_t sum = 0;
      for (const auto& [value, n] : kc.values) {
        require(!value.empty(), "empty feature value in class " + label.code());
        require(n >= 1, "non-positive count for '" + value + "' in class " + label.code());
        sum += n;
        seen[index_of(kind)].insert(value);
      }
      const std::string where = label.code() + "/" + std::string(to_string(kind));
      require(kc.total == sum, "kind_total != sum of value counts for " + where);
      require(kc.total <= counts.examples, "kind_total exceeds class count for " + where);
      require(kc.total == 0 || options_.enabled_kinds.contains(kind), "counts for disabled kind " + where);
    }
  }
  for (auto kind : kAllFeatureKinds) {
    require(seen[index_of(kind)] == vocabulary_[index_of(kind)],
            "vocabulary mismatch for kind " + std::string(to_string(kind)));
  }
}

std::int64_t NaiveBayesModel::class_count(const CountryLabel& label) const {
  auto it = classes_.find(label);
  return it == classes_.end() ? 0 : it->second.examples;
}

std::int64_t NaiveBayesModel::value_count(const CountryLabel& label, FeatureKind kind, std::string_view value) const {
  auto it = classes_.find(label);
  if (it == classes_.end()) return 0;
  const auto& values = it->second.kinds[index_of(kind)].values;
  auto v = values.find(value);
  return v == values.end() ? 0 : v->second;
}

std::int64_t NaiveBayesModel::kind_total(const CountryLabel& label, FeatureKind kind) const {
  auto it = classes_.find(label);
  return it == classes_.end() ? 0 : it->second.kinds[index_of(kind)].total;
}

bool NaiveBayesModel::scores(FeatureKind kind, std::string_view value) const {
  if (!options_.enabled_kinds.contains(kind)) return false;
  const auto& vocab = vocabulary_[index_of(kind)];
  return vocab.find(value) != vocab.end();
}

// -- training ----------------------------------------------------------------

ModelBuilder::ModelBuilder(ModelOptions options) : options_(std::move(options)) {
  if (!std::isfinite(options_.alpha) || options_.alpha < 0.0) throw InvalidArgument("alpha must be >= 0");
  if (options_.enabled_kinds.empty()) throw InvalidArgument("no enabled feature kinds");
}

void ModelBuilder::add(const FeatureVector& features, const CountryLabel& label) {
  ClassCounts& counts = classes_[label];
  ++counts.examples;
  ++examples_;
  features.for_each([&](FeatureKind kind, const std::string& value) {
    if (!options_.enabled_kinds.contains(kind)) {
      ++ignored_entries_;
      return;
    }
    KindCounts& kc = counts.kinds[index_of(kind)];
    ++kc.total;
    ++kc.values[value];
  });
}

void ModelBuilder::merge(const ModelBuilder& other) {
  if (!(options_ == other.options_)) throw InvalidArgument("cannot merge builders with different options");
  for (const auto& [label, theirs] : other.classes_) {
    ClassCounts& ours = classes_[label];
    ours.examples += theirs.examples;
    for (std::size_t k = 0; k < kFeatureKindCount; ++k) {
      ours.kinds[k].total += theirs.kinds[k].total;
      for (const auto& [value, n] : theirs.kinds[k].values) ours.kinds[k].values[value] += n;
    }
  }
  examples_ += other.examples_;
  ignored_entries_ += other.ignored_entries_;
}

NaiveBayesModel ModelBuilder::build() const {
  if (examples_ == 0) throw EmptyTrainingSet("no training examples");
  std::array<Vocabulary, kFeatureKindCount> vocabulary;
  for (const auto& [label, counts] : classes_) {
    for (std::size_t k = 0; k < kFeatureKindCount; ++k) {
      for (const auto& entry : counts.kinds[k].values) vocabulary[k].insert(entry.first);
    }
  }
  return NaiveBayesModel(classes_, std::move(vocabulary), options_);
}

NaiveBayesModel train(std::span<const LabeledFeatures> examples, const ModelOptions& options,
                      std::vector<std::string>* diagnostics) {
  if (examples.empty()) throw EmptyTrainingSet("no training examples");
  ModelBuilder builder(options);
  for (const auto& example : examples) builder.add(example.features, example.label);
  if (diagnostics != nullptr && builder.ignored_entries() > 0) {
    diagnostics->push_back("ignored " + std::to_string(builder.ignored_entries()) +
                           " feature entries of disabled kinds");
  }
  return builder.build();
}

NaiveBayesModel merge(const NaiveBayesModel& a, const NaiveBayesModel& b) {
  if (!(a.options() == b.options())) throw InvalidArgument("cannot merge models with different options");
  auto classes = a.classes();
  auto vocabulary = std::array<Vocabulary, kFeatureKindCount>{};
  for (auto kind : kAllFeatureKinds) {
    vocabulary[index_of(kind)] = a.vocabulary(kind);
    const auto& other = b.vocabulary(kind);
    vocabulary[index_of(kind)].insert(other.begin(), other.end());
  }
  for (const auto& [label, theirs] : b.classes()) {
    ClassCounts& ours = classes[label];
    ours.examples += theirs.examples;
    for (std::size_t k = 0; k < kFeatureKindCount; ++k) {
      ours.kinds[k].total += theirs.kinds[k].total;
      for (const auto& [value, n] : theirs.kinds[k].values) ours.kinds[k].values[value] += n;
    }
  }
  return NaiveBayesModel(std::move(classes), std::move(vocabulary), a.options());
}

// -- scoring -----------------------------------------------------------------

std::vector<ScoredClass> log_posterior(const NaiveBayesModel& model, const FeatureVector& features) {
  struct Term {
    FeatureKind kind;
    const std::string* value;
    double vocab_size;
  };
  std::vector<Term> terms;
  features.for_each([&](FeatureKind kind, const std::string& value) {
    if (model.scores(kind, value)) {
      terms.push_back({kind, &value, static_cast<double>(model.vocabulary(kind).size())});
    }
  });

  const double alpha = model.alpha();
  const double total = static_cast<double>(model.total_examples());
  const double uniform_prior = -std::log(static_cast<double>(model.num_classes()));

  std::vector<ScoredClass> ranked;
  ranked.reserve(model.num_classes());
  std::vector<double> priors;
  priors.reserve(model.num_classes());
  bool any_finite = false;

  for (const auto& [label, counts] : model.classes()) {
    const double prior =
        model.options().uniform_priors ? uniform_prior : std::log(static_cast<double>(counts.examples) / total);
    double score = prior;
    for (const Term& term : terms) {
      const KindCounts& kc = counts.kinds[index_of(term.kind)];
      auto it = kc.values.find(*term.value);
      const double numerator = static_cast<double>(it == kc.values.end() ? 0 : it->second) + alpha;
      const double denominator = static_cast<double>(kc.total) + alpha * term.vocab_size;
      if (numerator == 0.0 || denominator == 0.0) {
        score = kNegInf;
        break;
      }
      score += std::log(numerator / denominator);
    }
    any_finite = any_finite || score != kNegInf;
    ranked.push_back({label, score});
    priors.push_back(prior);
  }

  if (!any_finite) {
    for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].log_score = priors[i];
  }
  rank(ranked);
  return ranked;
}

CountryLabel classify(const NaiveBayesModel& model, const FeatureVector& features) {
  return log_posterior(model, features).front().label;
}

// -- persistence -------------------------------------------------------------

json model_to_json(const NaiveBayesModel& model, const json& config) {
  json doc;
  doc["format"] = kModelFormat;
  doc["schema_version"] = kModelSchemaVersion;
  doc["alpha"] = model.alpha();
  doc["uniform_priors"] = model.options().uniform_priors;
  doc["fold_case"] = model.options().fold_case;
  json kinds = json::array();
  for (auto kind : model.enabled_kinds().kinds()) kinds.push_back(to_string(kind));
  doc["enabled_kinds"] = std::move(kinds);
  doc["total_examples"] = model.total_examples();

  json vocabulary = json::object();
  for (auto kind : kAllFeatureKinds) {
    const auto& vocab = model.vocabulary(kind);
    if (!vocab.empty()) vocabulary[std::string(to_string(kind))] = json(std::vector<std::string>(vocab.begin(), vocab.end()));
  }
  doc["vocabulary"] = std::move(vocabulary);

  json classes = json::object();
  for (const auto& [label, counts] : model.classes()) {
    json entry;
    entry["examples"] = counts.examples;
    json per_kind = json::object();
    for (auto kind : kAllFeatureKinds) {
      const KindCounts& kc = counts.kinds[index_of(kind)];
      if (kc.total == 0) continue;
      json values = json::object();
      for (const auto& [value, n] : kc.values) values[value] = n;
      per_kind[std::string(to_string(kind))] = {{"total", kc.total}, {"values", std::move(values)}};
    }
    entry["kinds"] = std::move(per_kind);
    classes[label.code()] = std::move(entry);
  }
  doc["classes"] = std::move(classes);
  if (!config.is_null()) doc["config"] = config;
  return doc;
}

namespace {

const json& field(const json& object, const char* key) {
  require(object.is_object(), std::string("expected an object around '") + key + "'");
  auto it = object.find(key);
  require(it != object.end(), std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t integer(const json& value, const std::string& what) {
  require(value.is_number_integer(), what + " must be an integer");
  return value.get<std::int64_t>();
}

FeatureKind kind_named(const std::string& name) {
  auto kind = kind_from_string(name);
  require(kind.has_value() && to_string(*kind) == name, "unknown feature kind '" + name + "'");
  return *kind;
}

}  // namespace

NaiveBayesModel model_from_json(const json& doc) {
  require(doc.is_object(), "model document must be a JSON object");
  require(field(doc, "format") == kModelFormat, "not a geotweet model file");
  require(integer(field(doc, "schema_version"), "schema_version") == kModelSchemaVersion,
          "unsupported model schema version");

  ModelOptions options;
  const json& alpha = field(doc, "alpha");
  require(alpha.is_number(), "alpha must be a number");
  options.alpha = alpha.get<double>();
  require(field(doc, "uniform_priors").is_boolean(), "uniform_priors must be a boolean");
  options.uniform_priors = field(doc, "uniform_priors").get<bool>();
  require(field(doc, "fold_case").is_boolean(), "fold_case must be a boolean");
  options.fold_case = field(doc, "fold_case").get<bool>();

  options.enabled_kinds = KindSet{};
  const json& kinds = field(doc, "enabled_kinds");
  require(kinds.is_array(), "enabled_kinds must be an array");
  for (const auto& name : kinds) {
    require(name.is_string(), "enabled_kinds entries must be strings");
    options.enabled_kinds.insert(kind_named(name.get<std::string>()));
  }

  std::array<Vocabulary, kFeatureKindCount> vocabulary;
  const json& vocab = field(doc, "vocabulary");
  require(vocab.is_object(), "vocabulary must be an object");
  for (const auto& [name, values] : vocab.items()) {
    require(values.is_array(), "vocabulary." + name + " must be an array");
    auto& target = vocabulary[index_of(kind_named(name))];
    for (const auto& value : values) {
      require(value.is_string(), "vocabulary values must be strings");
      require(target.insert(value.get<std::string>()).second, "duplicate vocabulary value in " + name);
    }
  }

  NaiveBayesModel::ClassTable classes;
  const json& class_doc = field(doc, "classes");
  require(class_doc.is_object(), "classes must be an object");
  for (const auto& [code, entry] : class_doc.items()) {
    auto label = CountryLabel::try_parse(code);
    require(label.has_value() && label->code() == code, "invalid class label '" + code + "'");
    ClassCounts counts;
    counts.examples = integer(field(entry, "examples"), code + ".examples");
    const json& per_kind = field(entry, "kinds");
    require(per_kind.is_object(), code + ".kinds must be an object");
    for (const auto& [name, kc_doc] : per_kind.items()) {
      KindCounts& kc = counts.kinds[index_of(kind_named(name))];
      kc.total = integer(field(kc_doc, "total"), code + "." + name + ".total");
      const json& values = field(kc_doc, "values");
      require(values.is_object(), code + "." + name + ".values must be an object");
      for (const auto& [value, n] : values.items()) kc.values[value] = integer(n, "count of '" + value + "'");
    }
    classes.emplace(*label, std::move(counts));
  }

  NaiveBayesModel model(std::move(classes), std::move(vocabulary), std::move(options));
  require(integer(field(doc, "total_examples"), "total_examples") == model.total_examples(),
          "total_examples != sum of class counts");
  return model;
}

void save_model(const NaiveBayesModel& model, const std::filesystem::path& path, const json& config) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("cannot write model file: " + path.string());
  out << model_to_json(model, config).dump(2) << '\n';
  if (!out) throw Error("failed writing model file: " + path.string());
}

NaiveBayesModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptModel("cannot open model file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw CorruptModel("model file is not valid JSON: " + std::string(e.what()));
  }
  try {
    return model_from_json(doc);
  } catch (const json::exception& e) {
    throw CorruptModel(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace geotweet
