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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>

#include "geotweet/error.hpp"
#include "geotweet/geocode.hpp"
#include "geotweet/text.hpp"

namespace geotweet {
namespace {

constexpr double kEarthRadiusKm = 6371.0088;
constexpr double kKmPerDegreeLatitude = 111.19;

double parse_double(std::string_view s, const std::string& source, std::size_t line_no) {
  s = text::trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw MalformedInput(source + ": not a number: '" + std::string(s) + "'", line_no);
  }
  return value;
}

CountryLabel parse_country(std::string_view s, const std::string& source, std::size_t line_no) {
  auto label = CountryLabel::try_parse(text::trim(s));
  if (!label) throw MalformedInput(source + ": invalid country code '" + std::string(s) + "'", line_no);
  return *label;
}

bool skip_line(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return text::trim(line).empty() || line.front() == '#';
}

// Even-odd crossing test against one ring (x = lon, y = lat).
bool crosses(const std::vector<GeoPoint>& ring, double lon, double lat) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.latitude > lat) != (b.latitude > lat)) {
      double x = (b.longitude - a.longitude) * (lat - a.latitude) / (b.latitude - a.latitude) + a.longitude;
      if (lon < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

double haversine_km(double lat1, double lon1, double lat2, double lon2) noexcept {
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * rad;
  const double dlon = (lon2 - lon1) * rad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

BoundaryIndex BoundaryIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open boundary file: " + path.string());
  return parse(in, path.string());
}

BoundaryIndex BoundaryIndex::parse(std::istream& in, const std::string& source) {
  BoundaryIndex index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto cells = text::split(line, '\t');
    if (cells.size() != 3) throw MalformedInput(source + ": expected alpha2<TAB>ring<TAB>coords", line_no);
    std::vector<GeoPoint> ring;
    for (auto pair : text::split(text::trim(cells[2]), ' ')) {
      if (pair.empty()) continue;
      auto comma = pair.find(',');
      if (comma == std::string_view::npos) throw MalformedInput(source + ": bad coordinate pair", line_no);
      ring.push_back({parse_double(pair.substr(0, comma), source, line_no),
                      parse_double(pair.substr(comma + 1), source, line_no)});
    }
    if (ring.size() < 3) throw MalformedInput(source + ": ring needs at least 3 points", line_no);
    index.add_ring(parse_country(cells[0], source, line_no), std::move(ring));
  }
  return index;
}

void BoundaryIndex::add_ring(const CountryLabel& country, std::vector<GeoPoint> ring) {
  auto it = std::lower_bound(countries_.begin(), countries_.end(), country,
                             [](const Country& c, const CountryLabel& label) { return c.label < label; });
  if (it == countries_.end() || it->label != country) {
    it = countries_.insert(it, Country{country, {}, 180.0, 90.0, -180.0, -90.0});
  }
  for (const GeoPoint& p : ring) {
    it->min_lon = std::min(it->min_lon, p.longitude);
    it->max_lon = std::max(it->max_lon, p.longitude);
    it->min_lat = std::min(it->min_lat, p.latitude);
    it->max_lat = std::max(it->max_lat, p.latitude);
  }
  it->rings.push_back(std::move(ring));
}

std::optional<CountryLabel> BoundaryIndex::locate(double latitude, double longitude) const {
  for (const Country& country : countries_) {
    if (longitude < country.min_lon || longitude > country.max_lon || latitude < country.min_lat ||
        latitude > country.max_lat) {
      continue;
    }
    bool inside = false;
    for (const auto& ring : country.rings) inside ^= crosses(ring, longitude, latitude);
    if (inside) return country.label;
  }
  return std::nullopt;
}

PlaceIndex PlaceIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open places file: " + path.string());
  return parse(in, path.string());
}

PlaceIndex PlaceIndex::parse(std::istream& in, const std::string& source) {
  std::vector<Place> places;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto cells = text::split(line, '\t');
    if (cells.size() < 3) throw MalformedInput(source + ": expected lat<TAB>lon<TAB>alpha2", line_no);
    places.push_back({parse_double(cells[0], source, line_no), parse_double(cells[1], source, line_no),
                      parse_country(cells[2], source, line_no)});
  }
  std::stable_sort(places.begin(), places.end(),
                   [](const Place& a, const Place& b) { return a.latitude < b.latitude; });
  PlaceIndex index;
  index.places_ = std::move(places);
  return index;
}

void PlaceIndex::add(double latitude, double longitude, const CountryLabel& country) {
  auto it = std::upper_bound(places_.begin(), places_.end(), latitude,
                             [](double lat, const Place& p) { return lat < p.latitude; });
  places_.insert(it, Place{latitude, longitude, country});
}

std::optional<CountryLabel> PlaceIndex::nearest(double latitude, double longitude, double max_km) const {
  if (max_km <= 0.0) return std::nullopt;
  const double band = max_km / kKmPerDegreeLatitude;
  auto lo = std::lower_bound(places_.begin(), places_.end(), latitude - band,
                             [](const Place& p, double lat) { return p.latitude < lat; });
  const Place* best = nullptr;
  double best_km = max_km;
  for (auto it = lo; it != places_.end() && it->latitude <= latitude + band; ++it) {
    double km = haversine_km(latitude, longitude, it->latitude, it->longitude);
    if (km <= best_km) {
      if (best != nullptr && km == best_km && !(it->country < best->country)) continue;
      best = &*it;
      best_km = km;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->country;
}

}  // namespace geotweet
