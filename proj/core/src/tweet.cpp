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

#include "geotweet/tweet.hpp"

#include <cmath>
#include <limits>

#include "geotweet/error.hpp"
#include "geotweet/text.hpp"

namespace geotweet {
namespace {

using nlohmann::json;

const json* member(const json& object, const char* key) {
  if (!object.is_object()) return nullptr;
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return nullptr;
  return &*it;
}

std::optional<std::string> string_field(const json& object, const char* key) {
  const json* value = member(object, key);
  if (value == nullptr) return std::nullopt;
  if (!value->is_string()) throw MalformedInput(std::string("field '") + key + "' must be a string");
  auto s = value->get<std::string>();
  if (s.empty()) return std::nullopt;
  return s;
}

std::optional<double> number_field(const json& object, const char* key) {
  const json* value = member(object, key);
  if (value == nullptr) return std::nullopt;
  if (!value->is_number()) throw MalformedInput(std::string("field '") + key + "' must be a number");
  return value->get<double>();
}

std::optional<std::int32_t> offset_field(const json& object, const char* key) {
  const json* value = member(object, key);
  if (value == nullptr) return std::nullopt;
  if (!value->is_number_integer()) {
    throw MalformedInput(std::string("field '") + key + "' must be an integer");
  }
  auto seconds = value->get<std::int64_t>();
  if (seconds < -kMaxUtcOffsetSeconds || seconds > kMaxUtcOffsetSeconds) {
    throw MalformedInput(std::string("field '") + key + "' out of range: " + std::to_string(seconds));
  }
  return static_cast<std::int32_t>(seconds);
}

const json* object_field(const json& object, const char* key) {
  const json* value = member(object, key);
  if (value == nullptr) return nullptr;
  if (!value->is_object()) throw MalformedInput(std::string("field '") + key + "' must be an object");
  return value;
}

GeoPoint checked_point(double longitude, double latitude) {
  if (!std::isfinite(latitude) || latitude < -90.0 || latitude > 90.0) {
    throw MalformedInput("latitude out of range: " + std::to_string(latitude));
  }
  if (!std::isfinite(longitude) || longitude < -180.0 || longitude > 180.0) {
    throw MalformedInput("longitude out of range: " + std::to_string(longitude));
  }
  return {longitude, latitude};
}

// GeoJSON Point object; `lat_first` selects the legacy "geo" ordering.
std::optional<GeoPoint> point_field(const json& object, const char* key, bool lat_first) {
  const json* geo = object_field(object, key);
  if (geo == nullptr) return std::nullopt;
  const json* pair = member(*geo, "coordinates");
  if (pair == nullptr) return std::nullopt;
  if (!pair->is_array() || pair->size() != 2 || !(*pair)[0].is_number() || !(*pair)[1].is_number()) {
    throw MalformedInput(std::string("field '") + key + ".coordinates' must be a pair of numbers");
  }
  double a = (*pair)[0].get<double>();
  double b = (*pair)[1].get<double>();
  return lat_first ? checked_point(b, a) : checked_point(a, b);
}

std::optional<std::string> language(std::optional<std::string> code) {
  if (code) *code = text::ascii_lower(*code);
  return code;
}

std::optional<CountryLabel> country_code(std::optional<std::string> code) {
  if (!code) return std::nullopt;
  auto label = CountryLabel::try_parse(*code);
  if (!label) throw MalformedInput("country code must be two ASCII letters: '" + *code + "'");
  return label;
}

std::string id_field(const json& object) {
  if (auto id = string_field(object, "id_str")) return *id;
  const json* id = member(object, "id");
  if (id == nullptr) return {};
  if (id->is_string()) return id->get<std::string>();
  if (id->is_number_integer()) return id->dump();
  throw MalformedInput("field 'id' must be a string or integer");
}

template <typename T>
std::optional<T> first_of(std::optional<T> preferred, std::optional<T> fallback) {
  return preferred ? std::move(preferred) : std::move(fallback);
}

}  // namespace

TweetRecord tweet_from_json(const json& object) {
  if (!object.is_object()) throw MalformedInput("tweet must be a JSON object");

  TweetRecord tweet;
  tweet.id = id_field(object);
  tweet.text = string_field(object, "text").value_or("");

  const json* user = object_field(object, "user");
  const json empty = json::object();
  const json& u = user != nullptr ? *user : empty;

  tweet.user_location = first_of(string_field(u, "location"), string_field(object, "user_location"));
  tweet.time_zone = first_of(string_field(u, "time_zone"), string_field(object, "time_zone"));
  tweet.utc_offset_seconds = first_of(offset_field(u, "utc_offset"), offset_field(object, "utc_offset_seconds"));
  tweet.user_language = language(first_of(string_field(u, "lang"), string_field(object, "user_language")));
  tweet.tweet_language = language(first_of(string_field(object, "lang"), string_field(object, "tweet_language")));

  tweet.coordinates = point_field(object, "coordinates", false);
  if (!tweet.coordinates) tweet.coordinates = point_field(object, "geo", true);
  if (!tweet.coordinates) {
    auto lon = number_field(object, "lon");
    auto lat = number_field(object, "lat");
    if (lon.has_value() != lat.has_value()) throw MalformedInput("'lon' and 'lat' must appear together");
    if (lon) tweet.coordinates = checked_point(*lon, *lat);
  }

  std::optional<std::string> place_code;
  if (const json* place = object_field(object, "place")) place_code = string_field(*place, "country_code");
  tweet.place_country_code = country_code(first_of(place_code, string_field(object, "place_country_code")));
  return tweet;
}

TweetRecord parse_tweet(std::string_view raw) {
  json object;
  try {
    object = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw MalformedInput(std::string("invalid JSON: ") + e.what());
  }
  return tweet_from_json(object);
}

json to_record_json(const TweetRecord& tweet) {
  json out = json::object();
  out["id"] = tweet.id;
  out["text"] = tweet.text;
  if (tweet.user_location) out["user_location"] = *tweet.user_location;
  if (tweet.time_zone) out["time_zone"] = *tweet.time_zone;
  if (tweet.utc_offset_seconds) out["utc_offset_seconds"] = *tweet.utc_offset_seconds;
  if (tweet.tweet_language) out["tweet_language"] = *tweet.tweet_language;
  if (tweet.user_language) out["user_language"] = *tweet.user_language;
  if (tweet.coordinates) {
    out["lon"] = tweet.coordinates->longitude;
    out["lat"] = tweet.coordinates->latitude;
  }
  if (tweet.place_country_code) out["place_country_code"] = tweet.place_country_code->code();
  return out;
}

std::optional<CountryLabel> label_of(const TweetRecord& tweet, const ReverseResolver& resolver) {
  if (tweet.place_country_code) return tweet.place_country_code;
  if (!tweet.coordinates) return std::nullopt;

  const auto [longitude, latitude] = *tweet.coordinates;
  if (!resolver) throw ResolverFailure("no reverse geocoder configured");
  std::optional<CountryLabel> country;
  try {
    country = resolver(latitude, longitude);
  } catch (const RemoteUnavailable& e) {
    throw ResolverFailure(std::string("reverse geocoder unavailable: ") + e.what());
  }
  if (!country) {
    throw ResolverFailure("no country for (" + text::fixed(latitude, 6) + ", " + text::fixed(longitude, 6) + ")");
  }
  return country;
}

}  // namespace geotweet
