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

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geotweet/country.hpp"
#include "geotweet/tweet.hpp"

namespace geotweet {

// Declaration order is the canonical order: it matches the column order of
// the ablation table and fixes the summation order when scoring.
enum class FeatureKind : std::uint8_t {
  Location,
  Timezone,
  TweetLanguage,
  Geoparsed,
  UtcOffset,
  UserLanguage,
};

inline constexpr std::size_t kFeatureKindCount = 6;

inline constexpr std::array<FeatureKind, kFeatureKindCount> kAllFeatureKinds = {
    FeatureKind::Location,  FeatureKind::Timezone,  FeatureKind::TweetLanguage,
    FeatureKind::Geoparsed, FeatureKind::UtcOffset, FeatureKind::UserLanguage,
};

constexpr std::size_t index_of(FeatureKind kind) noexcept { return static_cast<std::size_t>(kind); }

// Stable snake_case names used in model files, reports and CLI flags.
std::string_view to_string(FeatureKind kind) noexcept;
// Also accepts the short aliases loc, tz, lang, language, geo, utc, user_lang.
std::optional<FeatureKind> kind_from_string(std::string_view name);

class KindSet {
 public:
  constexpr KindSet() = default;
  KindSet(std::initializer_list<FeatureKind> kinds) {
    for (auto kind : kinds) insert(kind);
  }

  static KindSet all() {
    KindSet set;
    set.bits_.set();
    return set;
  }

  /// Parses "location+timezone" (also ',' separated) or "all".
  /// Throws InvalidArgument on unknown names or an empty set.
  static KindSet parse(std::string_view spec);

  void insert(FeatureKind kind) { bits_.set(index_of(kind)); }
  void erase(FeatureKind kind) { bits_.reset(index_of(kind)); }
  bool contains(FeatureKind kind) const { return bits_.test(index_of(kind)); }
  bool empty() const { return bits_.none(); }
  std::size_t size() const { return bits_.count(); }
  bool is_subset_of(const KindSet& other) const { return (bits_ & ~other.bits_).none(); }

  std::vector<FeatureKind> kinds() const;
  std::string to_string() const;  // "location+timezone"

  friend bool operator==(const KindSet&, const KindSet&) = default;

 private:
  std::bitset<kFeatureKindCount> bits_;
};

/// Partial map FeatureKind -> normalized non-empty value.
class FeatureVector {
 public:
  /// Throws InvalidArgument on an empty value.
  void set(FeatureKind kind, std::string value);
  void erase(FeatureKind kind) { values_[index_of(kind)].reset(); }

  const std::optional<std::string>& get(FeatureKind kind) const { return values_[index_of(kind)]; }
  bool has(FeatureKind kind) const { return values_[index_of(kind)].has_value(); }

  std::size_t size() const;
  bool empty() const { return size() == 0; }

  FeatureVector restricted_to(const KindSet& kinds) const;

  /// Visits present entries in kind order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (auto kind : kAllFeatureKinds) {
      if (const auto& value = values_[index_of(kind)]) fn(kind, *value);
    }
  }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::array<std::optional<std::string>, kFeatureKindCount> values_;
};

/// Forward geocoding capability: free-text location -> country.
/// May throw RemoteUnavailable or InvalidQuery.
using Geoparser = std::function<std::optional<CountryLabel>(std::string_view query)>;

struct FeatureOptions {
  // Case-fold Location and Timezone values. Off reproduces raw-string counting.
  bool fold_case = true;
};

/// Builds the feature vector for the enabled kinds. Geoparser failures are
/// non-fatal: the Geoparsed entry is dropped and a note is appended to
/// `diagnostics` when provided. Throws InvalidArgument if `enabled` is empty.
FeatureVector extract_features(const TweetRecord& tweet, const Geoparser& geoparser, const KindSet& enabled,
                               const FeatureOptions& options = {},
                               std::vector<std::string>* diagnostics = nullptr);

}  // namespace geotweet
