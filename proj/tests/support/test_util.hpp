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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "geotweet/bayes.hpp"
#include "geotweet/features.hpp"

namespace testutil {

inline std::filesystem::path data_dir() { return GEOTWEET_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return GEOTWEET_FIXTURE_DIR; }

// Reference tweet (Leiden, NL) as nested Twitter JSON.
inline const char* kLeidenTweet = R"({
  "created_at": "Wed Jul 24 14:45:20 +0000 2013",
  "id_str": "360054236417314816",
  "text": "OH: \"Misschien kunnen we iets gaan doen met Movember? Wanneer is dat ook alweer?\"",
  "user": {
    "name": "Example User",
    "screen_name": "example_user",
    "location": "Awesome Enschede",
    "created_at": "Tue Jun 10 10:46:43 2008",
    "utc_offset": 3600,
    "time_zone": "Amsterdam",
    "geo_enabled": true,
    "statuses_count": 20182,
    "lang": "nl"
  },
  "coordinates": {"type": "Point", "coordinates": [4.48431747, 52.1674388]},
  "place": {
    "id": "99ad54d1cccb950b",
    "place_type": "city",
    "name": "Leiden",
    "full_name": "Leiden",
    "country_code": "NL",
    "country": "Nederland"
  },
  "lang": "nl"
})";

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("geotweet-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline geotweet::FeatureVector fv(std::initializer_list<std::pair<geotweet::FeatureKind, std::string>> entries) {
  geotweet::FeatureVector out;
  for (const auto& [kind, value] : entries) out.set(kind, value);
  return out;
}

// The three-example training set used throughout: two amsterdam/NL, one london/GB.
inline std::vector<geotweet::LabeledFeatures> three_examples() {
  using geotweet::CountryLabel;
  using geotweet::FeatureKind;
  return {
      {fv({{FeatureKind::Timezone, "amsterdam"}}), CountryLabel("NL")},
      {fv({{FeatureKind::Timezone, "amsterdam"}}), CountryLabel("NL")},
      {fv({{FeatureKind::Timezone, "london"}}), CountryLabel("GB")},
  };
}

}  // namespace testutil
