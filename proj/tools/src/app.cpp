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


#include <CLI11.hpp>

#include <functional>
#include <ostream>

#include "cli.hpp"
#include "geotweet/error.hpp"

namespace geotweet::cli {

namespace {

void add_run_options(CLI::App& app, RunConfig& c) {
  app.add_option("--in", c.input, "Input NDJSON file");
  app.add_option("--out", c.output, "Output file (NDJSON for label/classify, JSON report otherwise)");
  app.add_option("--model", c.model, "Model file");
  app.add_option("--eval", c.eval_input, "report: held-out labeled NDJSON (default: same set as --in)");
  app.add_option("--csv", c.csv, "Also write the report as CSV");

  app.add_option("--kinds", c.kinds, "Enabled feature kinds, e.g. location+timezone, or all");
  app.add_option("--kind-set", c.kind_sets, "ablate/report: one feature subset per flag");
  app.add_option("--preset", c.preset, "ablate: named subset list (standard)");
  app.add_flag("--per-country", c.per_country, "report: per-country accuracy table");

  app.add_option("--alpha", c.alpha, "Additive smoothing");
  app.add_flag("--uniform-priors", c.uniform_priors, "Ignore class frequencies");
  app.add_flag("--fold-case,!--no-fold-case", c.fold_case, "Case-fold location and timezone values");
  app.add_option("--k", c.k, "Cross-validation folds");
  app.add_option("--seed", c.seed, "Fold shuffle seed");
  app.add_flag("--paper-literal-folds", c.paper_literal_folds, "Train on one fold, test on the other k-1");
  app.add_option("--min-count", c.min_count, "report: minimum tweets per listed country");
  app.add_option("--region", c.region, "Region name (data-dir/regions/NAME.txt) or file");
  app.add_option("--top", c.top, "classify: ranked countries per record");

  app.add_option("--data-dir", c.data_dir, "Directory with gazetteer.tsv, boundaries.tsv, places.tsv, regions/");
  app.add_option("--gazetteer", c.gazetteer, "Gazetteer file (overrides data-dir)");
  app.add_option("--boundaries", c.boundaries, "Boundary file (overrides data-dir)");
  app.add_option("--places", c.places, "Places file (overrides data-dir)");
  app.add_option("--cache", c.cache, "Persistent geocode cache file");

  app.add_option("--geocoder", c.geocoder, "gazetteer (offline) or nominatim");
  app.add_option("--remote-url", c.remote_url, "Remote geocoder base URL (http://)");
  app.add_option("--remote-credential-env", c.remote_credential_env, "Environment variable holding the API key");
  app.add_option("--remote-timeout", c.remote_timeout, "Remote timeout in seconds");
  app.add_option("--max-in-flight", c.max_in_flight, "Concurrent remote requests");

  app.add_flag("--strict", c.strict, "Fail on the first malformed record");
  app.add_option("--jobs", c.jobs, "Worker threads");
}

int code_for(const Error& e) {
  if (dynamic_cast<const RemoteUnavailable*>(&e) || dynamic_cast<const ConflictingEntry*>(&e)) return kGeocoder;
  if (dynamic_cast<const CorruptModel*>(&e)) return kModel;
  if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const InvalidQuery*>(&e)) return kUsage;
  if (dynamic_cast<const MalformedInput*>(&e) || dynamic_cast<const EmptyTrainingSet*>(&e) ||
      dynamic_cast<const EmptyEvaluationSet*>(&e) || dynamic_cast<const InvalidFoldCount*>(&e) ||
      dynamic_cast<const InvalidDataset*>(&e)) {
    return kInput;
  }
  return kInternal;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Tweet home-country classifier", "geotweet");
  app.set_config("--config", "", "key = value file; keys are long flag names, flags win");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  add_run_options(app, config);
  std::function<nlohmann::json(const RunConfig&)> command;

  auto sub = [&](const char* name, const char* help, nlohmann::json (*fn)(const RunConfig&)) {
    return app.add_subcommand(name, help)->callback([&command, fn] { command = fn; });
  };
  sub("label", "Attach country labels from place or coordinates", cmd_label);
  sub("train", "Train a model from labeled NDJSON", cmd_train);
  sub("classify", "Predict countries for NDJSON records", cmd_classify);
  sub("evaluate", "k-fold cross-validation", cmd_evaluate);
  sub("ablate", "Cross-validation per feature subset", cmd_ablate);
  sub("report", "Per-country accuracy table", cmd_report);
  auto* cache = app.add_subcommand("cache", "Geocode cache maintenance");
  cache->require_subcommand(1);
  cache->fallthrough();
  cache->add_subcommand("stats", "Print cache counts")->callback([&] { command = cmd_cache_stats; });
  cache->add_subcommand("compact", "Rewrite the cache, one line per key")->callback([&] { command = cmd_cache_compact; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    out << command(config).dump(2) << '\n';
    return kOk;
  } catch (const CommandFailure& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return code_for(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace geotweet::cli
