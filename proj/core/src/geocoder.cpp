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

#include <cmath>

#include "geotweet/error.hpp"
#include "geotweet/geocode.hpp"
#include "geotweet/text.hpp"

namespace geotweet {

Geocoder::Geocoder(Gazetteer gazetteer, BoundaryIndex boundaries, PlaceIndex places,
                   std::shared_ptr<GeocodeCache> cache, std::shared_ptr<RemoteGeocoder> remote,
                   GeocoderOptions options)
    : gazetteer_(std::move(gazetteer)),
      boundaries_(std::move(boundaries)),
      places_(std::move(places)),
      cache_(cache ? std::move(cache) : std::make_shared<GeocodeCache>()),
      remote_(std::move(remote)),
      options_(options) {
  if (options_.max_in_flight == 0) throw InvalidArgument("max_in_flight must be at least 1");
  in_flight_ = std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(options_.max_in_flight));
}

std::mutex& Geocoder::stripe(const std::string& key) {
  return stripes_[text::fnv1a64(key) % stripes_.size()];
}

std::optional<CountryLabel> Geocoder::call_remote(const std::function<std::optional<CountryLabel>()>& fn) {
  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<>* sem;
    ~Release() { sem->release(); }
  } release{in_flight_.get()};
  return fn();
}

std::optional<CountryLabel> Geocoder::forward_geocode(std::string_view query) {
  if (text::trim(query).empty()) throw InvalidQuery("empty geocoding query");
  const std::string key(query);
  std::lock_guard per_key(stripe(key));

  if (auto cached = cache_->lookup(key)) return cached->outcome;

  CacheEntry entry;
  entry.outcome = gazetteer_.match(query);
  if (!entry.outcome && remote_) {
    entry.outcome = call_remote([&] { return remote_->forward(query); });
    entry.source = GeocodeSource::Remote;
  }
  cache_->store(key, entry);
  return entry.outcome;
}

std::optional<CountryLabel> Geocoder::reverse_geocode(double latitude, double longitude) {
  if (!std::isfinite(latitude) || !std::isfinite(longitude) || latitude < -90.0 || latitude > 90.0 ||
      longitude < -180.0 || longitude > 180.0) {
    throw InvalidArgument("coordinates out of range");
  }
  const std::string key = reverse_cache_key(latitude, longitude);
  std::lock_guard per_key(stripe(key));

  if (auto cached = cache_->lookup(key)) return cached->outcome;

  CacheEntry entry;
  entry.outcome = boundaries_.locate(latitude, longitude);
  if (!entry.outcome) entry.outcome = places_.nearest(latitude, longitude, options_.nearest_place_km);
  if (!entry.outcome && remote_) {
    entry.outcome = call_remote([&] { return remote_->reverse(latitude, longitude); });
    entry.source = GeocodeSource::Remote;
  }
  cache_->store(key, entry);
  return entry.outcome;
}

Geoparser Geocoder::geoparser() {
  return [this](std::string_view query) { return forward_geocode(query); };
}

ReverseResolver Geocoder::reverse_resolver() {
  return [this](double latitude, double longitude) { return reverse_geocode(latitude, longitude); };
}

}  // namespace geotweet
