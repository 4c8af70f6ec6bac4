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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "geotweet/country.hpp"

namespace geotweet {

struct GeoPoint {
  double longitude = 0.0;
  double latitude = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline constexpr std::int32_t kMaxUtcOffsetSeconds = 50400;

/// The classification-relevant subset of a tweet. Absent, null and empty
/// string source fields all become nullopt.
struct TweetRecord {
  std::string id;
  std::string text;
  std::optional<std::string> user_location;
  std::optional<std::string> time_zone;
  std::optional<std::int32_t> utc_offset_seconds;
  std::optional<std::string> tweet_language;  // lowercase
  std::optional<std::string> user_language;   // lowercase
  std::optional<GeoPoint> coordinates;
  std::optional<CountryLabel> place_country_code;

  friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

/// Parses one JSON object in either the nested Twitter layout
/// ("user"/"place"/"coordinates"/"geo") or the flat record layout
/// (id, text, user_location, time_zone, utc_offset_seconds, tweet_language,
/// user_language, lon, lat, place_country_code). When both layouts supply a
/// field, the nested one wins. Unknown keys are ignored.
///
/// Throws MalformedInput on invalid JSON or a present field of the wrong
/// type or out of range.
TweetRecord parse_tweet(std::string_view raw);
TweetRecord tweet_from_json(const nlohmann::json& object);

/// Flat record layout; absent optionals are omitted.
nlohmann::json to_record_json(const TweetRecord& tweet);

using ReverseResolver = std::function<std::optional<CountryLabel>(double latitude, double longitude)>;

/// Ground-truth country from embedded geo information: place_country_code
/// if present, else the resolver's answer for the coordinates, else nullopt.
/// Throws ResolverFailure when coordinates are present but the resolver
/// yields nothing or fails.
std::optional<CountryLabel> label_of(const TweetRecord& tweet, const ReverseResolver& resolver);

}  // namespace geotweet
