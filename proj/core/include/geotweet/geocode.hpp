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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geotweet/country.hpp"
#include "geotweet/features.hpp"
#include "geotweet/tweet.hpp"

namespace geotweet {

// ---------------------------------------------------------------------------
// Gazetteer: normalized place name -> country.
//
// File format: UTF-8 TSV, `name<TAB>alpha2[<TAB>provenance]`, '#' starts a
// comment line. Names are normalized on load (trim, collapse, ASCII fold).
// ---------------------------------------------------------------------------
class Gazetteer {
 public:
  struct Entry {
    CountryLabel country;
    std::string provenance;
  };

  /// Throws ConflictingEntry when one key maps to two countries, and
  /// MalformedInput (with line number) on unparsable lines.
  static Gazetteer load(const std::filesystem::path& path);
  static Gazetteer parse(std::istream& in, const std::string& source = "<stream>");

  /// Adds one entry; identical duplicates are accepted.
  void add(std::string_view name, const CountryLabel& country, std::string provenance = {});

  /// Exact lookup of an already-normalized key.
  const Entry* find(std::string_view normalized_key) const;

  /// Free-text lookup: the whole normalized query, then each comma-separated
  /// segment, then the longest contiguous word n-gram (leftmost on ties).
  std::optional<CountryLabel> match(std::string_view query) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::unordered_map<std::string, Entry> entries_;
  std::size_t max_tokens_ = 0;
};

// ---------------------------------------------------------------------------
// Reverse-geocoding fixtures.
// ---------------------------------------------------------------------------

/// Country polygons. File: `alpha2<TAB>ring_id<TAB>lon,lat lon,lat ...`.
/// Point-in-polygon uses the even-odd rule over all rings of a country, so
/// holes need no special casing.
class BoundaryIndex {
 public:
  static BoundaryIndex load(const std::filesystem::path& path);
  static BoundaryIndex parse(std::istream& in, const std::string& source = "<stream>");

  void add_ring(const CountryLabel& country, std::vector<GeoPoint> ring);
  std::optional<CountryLabel> locate(double latitude, double longitude) const;

  std::size_t country_count() const noexcept { return countries_.size(); }

 private:
  struct Country {
    CountryLabel label;
    std::vector<std::vector<GeoPoint>> rings;
    double min_lon, min_lat, max_lon, max_lat;
  };
  std::vector<Country> countries_;  // sorted by label
};

/// Populated places for nearest-point lookup. File: `lat<TAB>lon<TAB>alpha2[<TAB>name]`.
class PlaceIndex {
 public:
  static PlaceIndex load(const std::filesystem::path& path);
  static PlaceIndex parse(std::istream& in, const std::string& source = "<stream>");

  void add(double latitude, double longitude, const CountryLabel& country);
  /// Country of the closest place within `max_km` (great-circle), if any.
  std::optional<CountryLabel> nearest(double latitude, double longitude, double max_km) const;

  std::size_t size() const noexcept { return places_.size(); }

 private:
  struct Place {
    double latitude, longitude;
    CountryLabel country;
  };
  std::vector<Place> places_;  // sorted by latitude
};

double haversine_km(double lat1, double lon1, double lat2, double lon2) noexcept;

// ---------------------------------------------------------------------------
// Persistent geocode cache.
//
// File: append-only UTF-8 TSV `query<TAB>outcome<TAB>source<TAB>timestamp`,
// outcome is alpha-2 or `-` (negative result). Tabs/newlines/backslashes in
// queries are backslash-escaped. The last line per key wins on load.
// ---------------------------------------------------------------------------
enum class GeocodeSource { Gazetteer, Remote };

std::string_view to_string(GeocodeSource source) noexcept;

struct CacheEntry {
  std::optional<CountryLabel> outcome;  // nullopt = negative result
  GeocodeSource source = GeocodeSource::Gazetteer;
  std::string timestamp;  // ISO 8601, UTC

  friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::size_t entries = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t from_gazetteer = 0;
  std::size_t from_remote = 0;
};

class GeocodeCache {
 public:
  using Clock = std::function<std::string()>;

  /// In-memory only.
  GeocodeCache();
  /// Loads `path` if it exists and appends every new entry to it.
  explicit GeocodeCache(std::filesystem::path path, Clock clock = {});

  GeocodeCache(const GeocodeCache&) = delete;
  GeocodeCache& operator=(const GeocodeCache&) = delete;

  /// Counts a hit or a miss.
  std::optional<CacheEntry> lookup(const std::string& key) const;
  /// Stores (and persists) an outcome; stamps the timestamp if empty.
  void store(const std::string& key, CacheEntry entry);

  CacheStats stats() const;
  std::size_t size() const;

  /// Rewrites the backing file with one line per key, sorted by key.
  void compact();

  const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

  static std::string utc_now_iso8601();

 private:
  void load_file();

  std::optional<std::filesystem::path> path_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, CacheEntry> entries_;
  mutable std::uint64_t hits_ = 0;
  mutable std::uint64_t misses_ = 0;
  mutable std::mutex counter_mutex_;
};

CacheStats cache_stats(const GeocodeCache& cache);

/// Cache key for a reverse lookup: coordinates rounded to 4 decimals,
/// e.g. "@52.1674,4.4843".
std::string reverse_cache_key(double latitude, double longitude);

// ---------------------------------------------------------------------------
// Remote backends.
// ---------------------------------------------------------------------------

/// One method per direction. Implementations throw RemoteUnavailable on
/// transient failure and return nullopt for "no such place".
class RemoteGeocoder {
 public:
  virtual ~RemoteGeocoder() = default;
  virtual std::optional<CountryLabel> forward(std::string_view query) = 0;
  virtual std::optional<CountryLabel> reverse(double latitude, double longitude) = 0;
  virtual std::string name() const = 0;
};

struct GeocoderOptions {
  std::size_t max_in_flight = 1;      // concurrent remote requests
  double nearest_place_km = 30.0;     // reverse fallback radius; 0 disables
};

/// Local fixtures + optional remote client + cache, composed in that order.
/// Thread-safe; lookups of the same key are serialized.
class Geocoder {
 public:
  Geocoder(Gazetteer gazetteer, BoundaryIndex boundaries, PlaceIndex places,
           std::shared_ptr<GeocodeCache> cache, std::shared_ptr<RemoteGeocoder> remote = nullptr,
           GeocoderOptions options = {});

  /// Cache, then gazetteer, then remote. Every outcome including a miss is
  /// cached; RemoteUnavailable is propagated and not cached.
  /// Throws InvalidQuery for blank queries.
  std::optional<CountryLabel> forward_geocode(std::string_view query);

  /// Cache, then boundary polygons, then nearest place, then remote.
  /// Throws InvalidArgument for out-of-range coordinates.
  std::optional<CountryLabel> reverse_geocode(double latitude, double longitude);

  Geoparser geoparser();
  ReverseResolver reverse_resolver();

  GeocodeCache& cache() noexcept { return *cache_; }
  const Gazetteer& gazetteer() const noexcept { return gazetteer_; }

 private:
  std::mutex& stripe(const std::string& key);
  std::optional<CountryLabel> call_remote(const std::function<std::optional<CountryLabel>()>& fn);

  Gazetteer gazetteer_;
  BoundaryIndex boundaries_;
  PlaceIndex places_;
  std::shared_ptr<GeocodeCache> cache_;
  std::shared_ptr<RemoteGeocoder> remote_;
  GeocoderOptions options_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
  std::array<std::mutex, 16> stripes_;
};

}  // namespace geotweet
