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

#include "geotweet/features.hpp"

#include "geotweet/error.hpp"
#include "geotweet/text.hpp"

namespace geotweet {

std::string_view to_string(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::Location: return "location";
    case FeatureKind::Timezone: return "timezone";
    case FeatureKind::TweetLanguage: return "tweet_language";
    case FeatureKind::Geoparsed: return "geoparsed";
    case FeatureKind::UtcOffset: return "utc_offset";
    case FeatureKind::UserLanguage: return "user_language";
  }
  return "unknown";
}

std::optional<FeatureKind> kind_from_string(std::string_view name) {
  const std::string key = text::ascii_lower(text::trim(name));
  for (auto kind : kAllFeatureKinds) {
    if (key == to_string(kind)) return kind;
  }
  if (key == "loc") return FeatureKind::Location;
  if (key == "tz") return FeatureKind::Timezone;
  if (key == "lang" || key == "language") return FeatureKind::TweetLanguage;
  if (key == "geo") return FeatureKind::Geoparsed;
  if (key == "utc") return FeatureKind::UtcOffset;
  if (key == "user_lang") return FeatureKind::UserLanguage;
  return std::nullopt;
}

KindSet KindSet::parse(std::string_view spec) {
  if (text::ascii_lower(text::trim(spec)) == "all") return all();
  KindSet set;
  std::string normalized(spec);
  for (char& c : normalized) {
    if (c == ',') c = '+';
  }
  for (auto part : text::split(normalized, '+')) {
    if (text::trim(part).empty()) continue;
    auto kind = kind_from_string(part);
    if (!kind) throw InvalidArgument("unknown feature kind: '" + std::string(part) + "'");
    set.insert(*kind);
  }
  if (set.empty()) throw InvalidArgument("empty feature kind set");
  return set;
}

std::vector<FeatureKind> KindSet::kinds() const {
  std::vector<FeatureKind> out;
  for (auto kind : kAllFeatureKinds) {
    if (contains(kind)) out.push_back(kind);
  }
  return out;
}

std::string KindSet::to_string() const {
  std::string out;
  for (auto kind : kinds()) {
    if (!out.empty()) out.push_back('+');
    out += geotweet::to_string(kind);
  }
  return out;
}

void FeatureVector::set(FeatureKind kind, std::string value) {
  if (value.empty()) throw InvalidArgument("feature values must be non-empty");
  values_[index_of(kind)] = std::move(value);
}

std::size_t FeatureVector::size() const {
  std::size_t n = 0;
  for (const auto& value : values_) n += value.has_value();
  return n;
}

FeatureVector FeatureVector::restricted_to(const KindSet& kinds) const {
  FeatureVector out;
  for_each([&](FeatureKind kind, const std::string& value) {
    if (kinds.contains(kind)) out.values_[index_of(kind)] = value;
  });
  return out;
}

FeatureVector extract_features(const TweetRecord& tweet, const Geoparser& geoparser, const KindSet& enabled,
                               const FeatureOptions& options, std::vector<std::string>* diagnostics) {
  if (enabled.empty()) throw InvalidArgument("extract_features: no feature kinds enabled");

  auto note = [&](std::string message) {
    if (diagnostics != nullptr) diagnostics->push_back(std::move(message));
  };
  auto put = [](FeatureVector& fv, FeatureKind kind, std::string value) {
    if (!value.empty()) fv.set(kind, std::move(value));
  };

  FeatureVector fv;
  if (enabled.contains(FeatureKind::Location) && tweet.user_location) {
    put(fv, FeatureKind::Location, text::normalize_place(*tweet.user_location, options.fold_case));
  }
  if (enabled.contains(FeatureKind::Timezone) && tweet.time_zone) {
    put(fv, FeatureKind::Timezone, options.fold_case ? text::ascii_lower(*tweet.time_zone) : *tweet.time_zone);
  }
  if (enabled.contains(FeatureKind::TweetLanguage) && tweet.tweet_language) {
    put(fv, FeatureKind::TweetLanguage, text::ascii_lower(*tweet.tweet_language));
  }
  if (enabled.contains(FeatureKind::UtcOffset) && tweet.utc_offset_seconds) {
    fv.set(FeatureKind::UtcOffset, std::to_string(*tweet.utc_offset_seconds));
  }
  if (enabled.contains(FeatureKind::UserLanguage) && tweet.user_language) {
    put(fv, FeatureKind::UserLanguage, text::ascii_lower(*tweet.user_language));
  }
  // The geoparser sees the raw profile text; services cope with messy input.
  if (enabled.contains(FeatureKind::Geoparsed) && tweet.user_location &&
      !text::trim(*tweet.user_location).empty()) {
    if (!geoparser) {
      note("geoparsed: no geoparser configured");
    } else {
      try {
        if (auto country = geoparser(*tweet.user_location)) fv.set(FeatureKind::Geoparsed, country->code());
      } catch (const Error& e) {
        note(std::string("geoparsed: ") + e.what());
      }
    }
  }
  return fv;
}

}  // namespace geotweet
