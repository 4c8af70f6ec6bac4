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
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace geotweet::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,     // bad flags or option values
  kInput = 3,     // unreadable, malformed or unusable input/output files
  kModel = 4,     // missing or corrupt model file
  kGeocoder = 5,  // geocoder fixtures, cache or remote service
};

class CommandFailure : public std::runtime_error {
 public:
  CommandFailure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

// Every knob of a run. All fields except the input path have defaults.
struct RunConfig {
  std::string input;
  std::string output;
  std::string model;
  std::string eval_input;  // held-out set for `report`; empty = same set
  std::string csv;         // optional CSV companion for reports

  std::string kinds = "all";
  std::vector<std::string> kind_sets;  // ablate/report; empty = command default
  std::string preset;                  // ablate: "standard"
  bool per_country = false;

  double alpha = 1.0;
  bool uniform_priors = false;
  bool fold_case = true;
  std::size_t k = 10;
  std::uint64_t seed = 1;
  bool paper_literal_folds = false;
  std::int64_t min_count = 15;
  std::string region;  // name under <data-dir>/regions or a file path
  std::size_t top = 3;

  std::string data_dir;  // empty = built-in default
  std::string gazetteer;
  std::string boundaries;
  std::string places;
  std::string cache;  // empty = in-memory only

  std::string geocoder = "gazetteer";  // or "nominatim"
  std::string remote_url;
  std::string remote_credential_env;
  double remote_timeout = 10.0;
  std::size_t max_in_flight = 1;

  bool strict = false;
  std::size_t jobs = 1;  // execution detail, not echoed
};

/// The resolved configuration as embedded in output artifacts.
nlohmann::json to_json(const RunConfig& config);

std::string default_data_dir();

nlohmann::json cmd_label(const RunConfig& config);
nlohmann::json cmd_train(const RunConfig& config);
nlohmann::json cmd_classify(const RunConfig& config);
nlohmann::json cmd_evaluate(const RunConfig& config);
nlohmann::json cmd_ablate(const RunConfig& config);
nlohmann::json cmd_report(const RunConfig& config);
nlohmann::json cmd_cache_stats(const RunConfig& config);
nlohmann::json cmd_cache_compact(const RunConfig& config);

/// Parses arguments, runs one subcommand, prints its JSON summary to `out`
/// and errors to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geotweet::cli
