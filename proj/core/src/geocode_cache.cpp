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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "geotweet/error.hpp"
#include "geotweet/geocode.hpp"
#include "geotweet/text.hpp"

namespace geotweet {
namespace {

std::string format_line(const std::string& key, const CacheEntry& entry) {
  std::string line = text::escape_tsv(key);
  line += '\t';
  line += entry.outcome ? entry.outcome->code() : std::string("-");
  line += '\t';
  line += to_string(entry.source);
  line += '\t';
  line += entry.timestamp;
  line += '\n';
  return line;
}

}  // namespace

std::string_view to_string(GeocodeSource source) noexcept {
  return source == GeocodeSource::Remote ? "remote" : "gazetteer";
}

std::string GeocodeCache::utc_now_iso8601() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

GeocodeCache::GeocodeCache() : clock_(&GeocodeCache::utc_now_iso8601) {}

GeocodeCache::GeocodeCache(std::filesystem::path path, Clock clock)
    : path_(std::move(path)), clock_(clock ? std::move(clock) : Clock(&GeocodeCache::utc_now_iso8601)) {
  load_file();
}

void GeocodeCache::load_file() {
  std::ifstream in(*path_);
  if (!in) return;  // created on first store
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = text::split(line, '\t');
    if (cells.size() != 4) throw MalformedInput(path_->string() + ": expected 4 TSV columns", line_no);
    CacheEntry entry;
    if (cells[1] != "-") {
      entry.outcome = CountryLabel::try_parse(cells[1]);
      if (!entry.outcome) throw MalformedInput(path_->string() + ": bad outcome '" + std::string(cells[1]) + "'", line_no);
    }
    if (cells[2] == "remote") {
      entry.source = GeocodeSource::Remote;
    } else if (cells[2] != "gazetteer") {
      throw MalformedInput(path_->string() + ": bad source '" + std::string(cells[2]) + "'", line_no);
    }
    entry.timestamp = std::string(cells[3]);
    entries_[text::unescape_tsv(cells[0])] = std::move(entry);
  }
}

std::optional<CacheEntry> GeocodeCache::lookup(const std::string& key) const {
  std::optional<CacheEntry> found;
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) found = it->second;
  }
  std::lock_guard counters(counter_mutex_);
  ++(found ? hits_ : misses_);
  return found;
}

void GeocodeCache::store(const std::string& key, CacheEntry entry) {
  if (entry.timestamp.empty()) entry.timestamp = clock_();
  std::unique_lock lock(mutex_);
  if (path_) {
    std::ofstream out(*path_, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot append to geocode cache: " + path_->string());
    out << format_line(key, entry);
  }
  entries_[key] = std::move(entry);
}

CacheStats GeocodeCache::stats() const {
  CacheStats stats;
  {
    std::lock_guard counters(counter_mutex_);
    stats.hits = hits_;
    stats.misses = misses_;
  }
  std::shared_lock lock(mutex_);
  stats.entries = entries_.size();
  for (const auto& [key, entry] : entries_) {
    ++(entry.outcome ? stats.positives : stats.negatives);
    ++(entry.source == GeocodeSource::Remote ? stats.from_remote : stats.from_gazetteer);
  }
  return stats;
}

std::size_t GeocodeCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void GeocodeCache::compact() {
  std::unique_lock lock(mutex_);
  if (!path_) return;
  auto tmp = *path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot write geocode cache: " + tmp.string());
    for (const auto& [key, entry] : entries_) out << format_line(key, entry);
  }
  std::filesystem::rename(tmp, *path_);
}

CacheStats cache_stats(const GeocodeCache& cache) { return cache.stats(); }

std::string reverse_cache_key(double latitude, double longitude) {
  auto render = [](double degrees) {
    long long units = std::llround(degrees * 1e4);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%lld.%04lld", units < 0 ? "-" : "", std::llabs(units) / 10000,
                  std::llabs(units) % 10000);
    return std::string(buf);
  };
  return "@" + render(latitude) + "," + render(longitude);
}

}  // namespace geotweet
