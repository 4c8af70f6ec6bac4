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


#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <sstream>
#include <typeinfo>

#include "cli.hpp"
#include "geotweet/bayes.hpp"
#include "geotweet/error.hpp"
#include "geotweet/eval.hpp"
#include "geotweet/geocode.hpp"
#include "geotweet/http_geocoder.hpp"
#include "geotweet/report.hpp"
#include "geotweet/text.hpp"

namespace geotweet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Generic errors (mostly unopenable files) take the exit code of the stage
// they happened in; typed errors keep their own mapping.
template <class F>
decltype(auto) stage(int code, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (typeid(e) == typeid(Error)) throw CommandFailure(code, e.what());
    throw;
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw CommandFailure(kUsage, message);
}

std::string data_path(const RunConfig& config, const std::string& override_path, const char* name) {
  if (!override_path.empty()) return override_path;
  const std::string dir = config.data_dir.empty() ? default_data_dir() : config.data_dir;
  return (fs::path(dir) / name).string();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandFailure(kInput, "cannot read " + path);
  return in;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw CommandFailure(kInput, "cannot write " + path);
}

std::string pretty(const json& doc) { return doc.dump(2) + "\n"; }

KindSet parse_kinds(const std::string& spec) {
  try {
    return KindSet::parse(spec);
  } catch (const Error& e) {
    throw CommandFailure(kUsage, e.what());
  }
}

std::optional<Region> resolve_region(const RunConfig& config) {
  if (config.region.empty()) return std::nullopt;
  fs::path path(config.region);
  if (!fs::exists(path)) {
    const std::string dir = config.data_dir.empty() ? default_data_dir() : config.data_dir;
    path = fs::path(dir) / "regions" / (config.region + ".txt");
  }
  if (!fs::exists(path)) throw CommandFailure(kUsage, "unknown region: " + config.region);
  return stage(kInput, [&] { return Region::load(path); });
}

// Geocoder plus a record of remote outages. Feature extraction treats a
// failing geoparser as "no feature"; the CLI refuses to silently degrade.
struct GeocoderHandle {
  std::unique_ptr<Geocoder> geocoder;
  std::shared_ptr<std::atomic<bool>> remote_down = std::make_shared<std::atomic<bool>>(false);
  std::shared_ptr<std::string> remote_error = std::make_shared<std::string>();
  std::shared_ptr<std::mutex> error_mutex = std::make_shared<std::mutex>();

  template <class F>
  auto guarded(F&& fn) const {
    try {
      return fn();
    } catch (const RemoteUnavailable& e) {
      std::lock_guard lock(*error_mutex);
      if (!remote_down->exchange(true)) *remote_error = e.what();
      throw;
    }
  }

  Geoparser geoparser() const {
    return [this](std::string_view q) { return guarded([&] { return geocoder->forward_geocode(q); }); };
  }
  ReverseResolver resolver() const {
    return [this](double lat, double lon) { return guarded([&] { return geocoder->reverse_geocode(lat, lon); }); };
  }
  void check() const {
    if (remote_down->load()) {
      std::lock_guard lock(*error_mutex);
      throw CommandFailure(kGeocoder, "remote geocoder unavailable: " + *remote_error);
    }
  }
};

GeocoderHandle make_geocoder(const RunConfig& config, bool reverse) {
  return stage(kGeocoder, [&] {
    GeocoderHandle handle;
    Gazetteer gazetteer = Gazetteer::load(data_path(config, config.gazetteer, "gazetteer.tsv"));
    BoundaryIndex boundaries;
    PlaceIndex places;
    if (reverse) {
      boundaries = BoundaryIndex::load(data_path(config, config.boundaries, "boundaries.tsv"));
      places = PlaceIndex::load(data_path(config, config.places, "places.tsv"));
    }
    auto cache = config.cache.empty() ? std::make_shared<GeocodeCache>() : std::make_shared<GeocodeCache>(config.cache);

    std::shared_ptr<RemoteGeocoder> remote;
    if (config.geocoder == "nominatim") {
      require(!config.remote_url.empty(), "--geocoder nominatim needs --remote-url");
      HttpGeocoderConfig http;
      http.base_url = config.remote_url;
      http.credential_env = config.remote_credential_env;
      http.timeout_seconds = config.remote_timeout;
      remote = std::make_shared<HttpGeocoder>(http);
    } else {
      require(config.geocoder == "gazetteer", "unknown geocoder backend: " + config.geocoder);
    }
    GeocoderOptions options;
    options.max_in_flight = config.max_in_flight;
    handle.geocoder = std::make_unique<Geocoder>(std::move(gazetteer), std::move(boundaries), std::move(places),
                                                 std::move(cache), std::move(remote), options);
    return handle;
  });
}

struct LineCounts {
  std::size_t total = 0;
  std::size_t malformed = 0;
};

// Calls `fn(line_no, line)` for every non-blank line.
template <class F>
void for_each_line(std::istream& in, F&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    fn(line_no, line);
  }
}

LabeledTweet parse_labeled(const std::string& line, std::size_t line_no) {
  try {
    const json doc = json::parse(line);
    if (!doc.is_object()) throw MalformedInput("record is not a JSON object", line_no);
    auto label = doc.find("label");
    if (label == doc.end() || !label->is_string()) throw MalformedInput("missing string field 'label'", line_no);
    auto parsed = CountryLabel::try_parse(label->get<std::string>());
    if (!parsed || parsed->is_other()) throw MalformedInput("invalid label '" + label->get<std::string>() + "'", line_no);
    return {tweet_from_json(doc), *parsed};
  } catch (const json::exception& e) {
    throw MalformedInput(e.what(), line_no);
  } catch (const MalformedInput& e) {
    if (e.line() != 0) throw;
    throw MalformedInput(e.what(), line_no);
  }
}

LabeledDataset read_labeled(const std::string& path, bool strict, LineCounts& counts) {
  auto in = open_input(path);
  LabeledDataset data{path, {}};
  for_each_line(in, [&](std::size_t line_no, const std::string& line) {
    ++counts.total;
    try {
      data.examples.push_back(parse_labeled(line, line_no));
    } catch (const MalformedInput&) {
      if (strict) throw;
      ++counts.malformed;
    }
  });
  return data;
}

std::vector<LabeledFeatures> featurize_checked(const LabeledDataset& data, const GeocoderHandle& geo,
                                               const KindSet& kinds, const RunConfig& config) {
  FeatureOptions options;
  options.fold_case = config.fold_case;
  auto features = featurize(data, geo.geoparser(), kinds, options);
  geo.check();
  return features;
}

std::vector<KindSet> parse_kind_sets(const std::vector<std::string>& specs) {
  std::vector<KindSet> out;
  for (const auto& spec : specs) out.push_back(parse_kinds(spec));
  return out;
}

KindSet union_of(const std::vector<KindSet>& sets) {
  KindSet all;
  for (const auto& set : sets) {
    for (auto kind : set.kinds()) all.insert(kind);
  }
  return all;
}

void maybe_collapse(LabeledDataset& data, const std::optional<Region>& region) {
  if (!region) return;
  for (auto& example : data.examples) example.label = collapse_label(example.label, *region);
}

json run_echo(const RunConfig& config, const std::optional<Region>& region) {
  json echo = to_json(config);
  if (region) echo["region_hash"] = region->content_hash;
  return echo;
}

// CSV companions carry the hash of the JSON config echo on their first line.
void write_csv(const std::string& path, const json& echo, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) return;
  std::ostringstream out;
  out << "# run_config " << text::hex64(text::fnv1a64(echo.dump())) << "\n";
  body(out);
  write_text(path, out.str());
}

CvConfig cv_config(const RunConfig& config, const KindSet& kinds) {
  CvConfig cv;
  cv.k = config.k;
  cv.kinds = kinds;
  cv.alpha = config.alpha;
  cv.uniform_priors = config.uniform_priors;
  cv.seed = config.seed;
  cv.orientation = config.paper_literal_folds ? FoldOrientation::Inverted : FoldOrientation::Standard;
  cv.jobs = std::max<std::size_t>(1, config.jobs);
  return cv;
}

void check_common(const RunConfig& config) {
  require(!config.input.empty(), "--in is required");
  require(config.alpha >= 0.0, "--alpha must be >= 0");
}

}  // namespace

json to_json(const RunConfig& c) {
  return {
      {"input", c.input},
      {"output", c.output},
      {"model", c.model},
      {"eval_input", c.eval_input},
      {"kinds", c.kinds},
      {"kind_sets", c.kind_sets},
      {"preset", c.preset},
      {"per_country", c.per_country},
      {"alpha", c.alpha},
      {"uniform_priors", c.uniform_priors},
      {"fold_case", c.fold_case},
      {"k", c.k},
      {"seed", c.seed},
      {"fold_orientation", c.paper_literal_folds ? "inverted" : "standard"},
      {"min_count", c.min_count},
      {"region", c.region},
      {"top", c.top},
      {"data_dir", c.data_dir.empty() ? default_data_dir() : c.data_dir},
      {"gazetteer", c.gazetteer},
      {"boundaries", c.boundaries},
      {"places", c.places},
      {"cache", c.cache},
      {"geocoder", c.geocoder},
      {"remote_url", c.remote_url},
      {"remote_credential_env", c.remote_credential_env},
      {"remote_timeout", c.remote_timeout},
      {"max_in_flight", c.max_in_flight},
      {"strict", c.strict},
  };
}

std::string default_data_dir() {
  for (const char* candidate : {GEOTWEET_SOURCE_DATA_DIR, GEOTWEET_INSTALL_DATA_DIR}) {
    std::error_code ec;
    if (fs::is_directory(candidate, ec)) return candidate;
  }
  return GEOTWEET_INSTALL_DATA_DIR;
}

// -- label -------------------------------------------------------------------

json cmd_label(const RunConfig& config) {
  check_common(config);
  require(!config.output.empty(), "--out is required");
  auto geo = make_geocoder(config, /*reverse=*/true);
  auto in = open_input(config.input);
  std::ofstream out(config.output, std::ios::binary | std::ios::trunc);
  if (!out) throw CommandFailure(kInput, "cannot write " + config.output);

  std::size_t total = 0, labeled = 0, skipped = 0, malformed = 0;
  for_each_line(in, [&](std::size_t line_no, const std::string& line) {
    ++total;
    TweetRecord tweet;
    try {
      tweet = parse_tweet(line);
    } catch (const MalformedInput& e) {
      if (config.strict) throw MalformedInput(e.what(), line_no);
      ++malformed;
      return;
    }
    std::optional<CountryLabel> label;
    try {
      label = label_of(tweet, geo.resolver());
    } catch (const ResolverFailure&) {
      geo.check();
    }
    if (!label) {
      ++skipped;
      return;
    }
    json record = to_record_json(tweet);
    record["label"] = label->code();
    out << record.dump() << '\n';
    ++labeled;
  });
  out.close();
  if (!out) throw CommandFailure(kInput, "cannot write " + config.output);

  json summary = {{"total", total}, {"labeled", labeled}, {"skipped", skipped}, {"malformed", malformed}};
  write_text(config.output + ".meta.json", pretty({{"config", to_json(config)}, {"summary", summary}}));
  return summary;
}

// -- train -------------------------------------------------------------------

json cmd_train(const RunConfig& config) {
  check_common(config);
  require(!config.model.empty(), "--model is required");
  const KindSet kinds = parse_kinds(config.kinds);
  auto geo = make_geocoder(config, /*reverse=*/false);

  ModelOptions options;
  options.alpha = config.alpha;
  options.enabled_kinds = kinds;
  options.uniform_priors = config.uniform_priors;
  options.fold_case = config.fold_case;
  FeatureOptions feature_options;
  feature_options.fold_case = config.fold_case;

  // Streams: only the counts are held in memory.
  ModelBuilder builder(options);
  auto in = open_input(config.input);
  std::size_t total = 0, malformed = 0;
  for_each_line(in, [&](std::size_t line_no, const std::string& line) {
    ++total;
    std::optional<LabeledTweet> example;
    try {
      example = parse_labeled(line, line_no);
    } catch (const MalformedInput&) {
      if (config.strict) throw;
      ++malformed;
      return;
    }
    builder.add(extract_features(example->tweet, geo.geoparser(), kinds, feature_options), example->label);
    geo.check();
  });
  const NaiveBayesModel model = builder.build();
  stage(kModel, [&] { save_model(model, config.model, to_json(config)); });

  json vocabulary = json::object();
  for (auto kind : kinds.kinds()) vocabulary[std::string(to_string(kind))] = model.vocabulary(kind).size();
  return {{"classes", model.num_classes()},      {"total_examples", model.total_examples()},
          {"vocabulary", vocabulary},             {"ignored_entries", builder.ignored_entries()},
          {"records", total},                     {"malformed", malformed}};
}

// -- classify ----------------------------------------------------------------

namespace {

struct ClassifyContext {
  const NaiveBayesModel& model;
  const GeocoderHandle& geo;
  FeatureOptions options;
  std::size_t top;
  bool strict;
};

struct ClassifiedLine {
  std::string output;
  bool malformed = false;
};

ClassifiedLine classify_line(const ClassifyContext& ctx, std::size_t line_no, const std::string& line) {
  std::optional<CountryLabel> truth;
  TweetRecord tweet;
  try {
    json doc = json::parse(line);
    if (!doc.is_object()) throw MalformedInput("record is not a JSON object");
    tweet = tweet_from_json(doc);
    if (auto label = doc.find("label"); label != doc.end() && label->is_string()) {
      truth = CountryLabel::try_parse(label->get<std::string>());
    }
  } catch (const std::exception& e) {
    if (ctx.strict) throw MalformedInput(e.what(), line_no);
    return {json{{"line", line_no}, {"error", e.what()}}.dump(), true};
  }

  const FeatureVector features =
      extract_features(tweet, ctx.geo.geoparser(), ctx.model.enabled_kinds(), ctx.options);
  const auto ranked = log_posterior(ctx.model, features);
  json record;
  record["id"] = tweet.id;
  record["predicted"] = ranked.front().label.code();
  json top = json::array();
  for (std::size_t i = 0; i < std::min(ctx.top, ranked.size()); ++i) {
    top.push_back({{"country", ranked[i].label.code()}, {"log_score", ranked[i].log_score}});
  }
  record["top"] = top;
  json tags = json::array();
  for (auto tag : diagnose(ctx.model, features, truth)) tags.push_back(std::string(to_string(tag)));
  record["diagnostics"] = tags;
  if (truth) record["label"] = truth->code();
  return {record.dump(), false};
}

}  // namespace

json cmd_classify(const RunConfig& config) {
  check_common(config);
  require(!config.model.empty(), "--model is required");
  require(!config.output.empty(), "--out is required");
  require(config.top >= 1, "--top must be >= 1");
  const NaiveBayesModel model = stage(kModel, [&] { return load_model(config.model); });
  auto geo = make_geocoder(config, /*reverse=*/false);
  auto in = open_input(config.input);
  std::ofstream out(config.output, std::ios::binary | std::ios::trunc);
  if (!out) throw CommandFailure(kInput, "cannot write " + config.output);

  FeatureOptions options;
  options.fold_case = model.options().fold_case;
  const ClassifyContext ctx{model, geo, options, config.top, config.strict};
  const std::size_t jobs = std::max<std::size_t>(1, config.jobs);
  const std::size_t batch_size = 256 * jobs;

  std::size_t total = 0, malformed = 0;
  std::vector<std::pair<std::size_t, std::string>> batch;
  std::map<std::string, std::size_t> predicted;

  // Lines are processed in bounded batches; results are written in input order.
  auto flush = [&] {
    std::vector<ClassifiedLine> results(batch.size());
    if (jobs == 1 || batch.size() < 2) {
      for (std::size_t i = 0; i < batch.size(); ++i) results[i] = classify_line(ctx, batch[i].first, batch[i].second);
    } else {
      std::vector<std::future<void>> workers;
      const std::size_t stride = (batch.size() + jobs - 1) / jobs;
      for (std::size_t begin = 0; begin < batch.size(); begin += stride) {
        const std::size_t end = std::min(batch.size(), begin + stride);
        workers.push_back(std::async(std::launch::async, [&, begin, end] {
          for (std::size_t i = begin; i < end; ++i) results[i] = classify_line(ctx, batch[i].first, batch[i].second);
        }));
      }
      for (auto& w : workers) w.get();
    }
    geo.check();
    for (const auto& r : results) {
      out << r.output << '\n';
      if (r.malformed) ++malformed;
    }
    batch.clear();
  };

  for_each_line(in, [&](std::size_t line_no, const std::string& line) {
    ++total;
    batch.emplace_back(line_no, line);
    if (batch.size() >= batch_size) flush();
  });
  flush();
  out.close();
  if (!out) throw CommandFailure(kInput, "cannot write " + config.output);

  json summary = {{"total", total}, {"classified", total - malformed}, {"malformed", malformed}};
  write_text(config.output + ".meta.json", pretty({{"config", to_json(config)}, {"summary", summary}}));
  return summary;
}

// -- evaluate / ablate / report ----------------------------------------------

json cmd_evaluate(const RunConfig& config) {
  check_common(config);
  require(!config.output.empty(), "--out is required");
  const KindSet kinds = parse_kinds(config.kinds);
  const auto region = resolve_region(config);
  auto geo = make_geocoder(config, /*reverse=*/false);

  LineCounts counts;
  LabeledDataset data = read_labeled(config.input, config.strict, counts);
  maybe_collapse(data, region);
  const auto features = featurize_checked(data, geo, kinds, config);
  const auto report = cross_validate(features, cv_config(config, kinds));

  const json echo = run_echo(config, region);
  write_text(config.output, pretty(report::evaluation_json(report, echo)));
  write_csv(config.csv, echo, [&](std::ostream& os) { report::write_evaluation_csv(os, report); });
  return {{"examples", report.n_examples},
          {"malformed", counts.malformed},
          {"accuracy", report::rational_json(report.overall)},
          {"mean_of_folds", report.mean_of_folds}};
}

json cmd_ablate(const RunConfig& config) {
  check_common(config);
  require(!config.output.empty(), "--out is required");
  std::vector<KindSet> subsets;
  if (config.preset == "standard") {
    require(config.kind_sets.empty(), "--preset and --kind-set are exclusive");
    subsets = ablation_preset();
  } else {
    require(config.preset.empty(), "unknown preset: " + config.preset);
    subsets = parse_kind_sets(config.kind_sets);
    require(!subsets.empty(), "ablate needs --preset standard or at least one --kind-set");
  }
  const auto region = resolve_region(config);
  auto geo = make_geocoder(config, /*reverse=*/false);

  LineCounts counts;
  LabeledDataset data = read_labeled(config.input, config.strict, counts);
  maybe_collapse(data, region);
  const auto features = featurize_checked(data, geo, union_of(subsets), config);
  const auto rows = ablate(features, subsets, cv_config(config, KindSet::all()));

  const json echo = run_echo(config, region);
  write_text(config.output, pretty(report::ablation_json(rows, echo)));
  write_csv(config.csv, echo, [&](std::ostream& os) { report::write_ablation_csv(os, rows); });
  json summary = json::array();
  for (const auto& row : rows) {
    summary.push_back({{"kinds", row.subset.to_string()}, {"accuracy", row.report.overall.value()}});
  }
  return {{"examples", features.size()}, {"malformed", counts.malformed}, {"rows", summary}};
}

json cmd_report(const RunConfig& config) {
  check_common(config);
  require(config.per_country, "report currently supports --per-country only");
  require(!config.output.empty(), "--out is required");
  require(config.min_count >= 1, "--min-count must be >= 1");
  std::vector<KindSet> kind_sets = parse_kind_sets(config.kind_sets);
  if (kind_sets.empty()) {
    kind_sets = {parse_kinds("location+timezone+geoparsed"), parse_kinds("location+timezone+tweet_language"),
                 parse_kinds("location+timezone+tweet_language+geoparsed")};
  }
  const auto region = resolve_region(config);
  auto geo = make_geocoder(config, /*reverse=*/false);

  LineCounts counts;
  const LabeledDataset train_data = read_labeled(config.input, config.strict, counts);
  const KindSet kinds = union_of(kind_sets);
  const auto train_features = featurize_checked(train_data, geo, kinds, config);
  std::vector<LabeledFeatures> eval_features;
  if (!config.eval_input.empty()) {
    const LabeledDataset eval_data = read_labeled(config.eval_input, config.strict, counts);
    eval_features = featurize_checked(eval_data, geo, kinds, config);
  }

  PerCountryOptions options;
  options.kind_sets = kind_sets;
  options.min_count = config.min_count;
  options.alpha = config.alpha;
  options.uniform_priors = config.uniform_priors;
  options.region = region ? &*region : nullptr;
  options.same_set = config.eval_input.empty();
  const auto table =
      per_country_report(train_features, options.same_set ? train_features : eval_features, options);

  const json echo = run_echo(config, region);
  write_text(config.output, pretty(report::per_country_json(table, echo)));
  write_csv(config.csv, echo, [&](std::ostream& os) { report::write_per_country_csv(os, table); });
  return {{"rows", table.rows.size()}, {"omitted", table.omitted}, {"malformed", counts.malformed},
          {"average", table.average}, {"stddev", table.stddev}};
}

// -- cache -------------------------------------------------------------------

namespace {

json stats_json(const CacheStats& s) {
  return {{"entries", s.entries},     {"positives", s.positives},           {"negatives", s.negatives},
          {"from_gazetteer", s.from_gazetteer}, {"from_remote", s.from_remote}};
}

std::unique_ptr<GeocodeCache> open_cache(const RunConfig& config) {
  require(!config.cache.empty(), "--cache is required");
  if (!fs::exists(config.cache)) throw CommandFailure(kInput, "no cache file at " + config.cache);
  return stage(kGeocoder, [&] { return std::make_unique<GeocodeCache>(config.cache); });
}

}  // namespace

json cmd_cache_stats(const RunConfig& config) { return stats_json(cache_stats(*open_cache(config))); }

json cmd_cache_compact(const RunConfig& config) {
  auto cache = open_cache(config);
  const auto before = fs::file_size(config.cache);
  stage(kGeocoder, [&] { cache->compact(); });
  json summary = stats_json(cache_stats(*cache));
  summary["bytes_before"] = before;
  summary["bytes_after"] = fs::file_size(config.cache);
  return summary;
}

}  // namespace geotweet::cli
