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

#include <iosfwd>
#include <span>

#include <nlohmann/json.hpp>

#include "geotweet/eval.hpp"

// Report serialization. CSV column orders are fixed:
//
//   evaluation:  country,n_tweets,correct,accuracy            (+ final "ALL" row)
//   ablation:    location,timezone,tweet_language,geoparsed,utc_offset,
//                user_language,correct,n,accuracy,mean_fold_accuracy
//   per-country: country,n_tweets,<one column per kind set>   (percent, 2 dp)
//                followed by "Average", "Standard deviation" and region rows
//
// JSON documents embed `run_config` verbatim under "config.run".
namespace geotweet::report {

nlohmann::json cv_config_json(const CvConfig& config, const std::string& fold_fingerprint);
nlohmann::json rational_json(const Rational& r);

nlohmann::json evaluation_json(const EvaluationReport& report, const nlohmann::json& run_config = nullptr);
void write_evaluation_csv(std::ostream& out, const EvaluationReport& report);

nlohmann::json ablation_json(std::span<const AblationRow> rows, const nlohmann::json& run_config = nullptr);
void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows);

nlohmann::json per_country_json(const PerCountryTable& table, const nlohmann::json& run_config = nullptr);
void write_per_country_csv(std::ostream& out, const PerCountryTable& table);

}  // namespace geotweet::report
