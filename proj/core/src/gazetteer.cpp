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
#include <array>
#include <fstream>
#include <istream>

#include "geotweet/error.hpp"
#include "geotweet/geocode.hpp"
#include "geotweet/text.hpp"

namespace geotweet {
namespace {

// Function words that must never resolve on their own during n-gram search.
constexpr std::array<std::string_view, 24> kStopwords = {
    "the", "and", "for", "from", "with", "near", "around", "all", "over", "you", "not", "but",
    "out", "our", "its", "any", "one", "her", "his", "she", "him", "was", "are", "who",
};

bool is_stopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) != kStopwords.end();
}

bool is_edge_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '"' || c == '\'' ||
         c == '(' || c == ')' || c == '[' || c == ']' || c == '|' || c == '/' || c == '-' || c == '*' ||
         c == '~' || c == '#' || c == '@';
}

std::string_view strip_punct(std::string_view s) {
  while (!s.empty() && is_edge_punct(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_edge_punct(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    auto token = strip_punct(current);
    if (!token.empty()) tokens.emplace_back(token);
    current.clear();
  };
  for (char c : normalized) {
    if (c == ' ' || c == ',' || c == '/' || c == '|') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return tokens;
}

std::size_t token_count(std::string_view key) {
  return static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1;
}

}  // namespace

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gazetteer: " + path.string());
  return parse(in, path.string());
}

Gazetteer Gazetteer::parse(std::istream& in, const std::string& source) {
  Gazetteer gazetteer;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto cells = text::split(line, '\t');
    if (cells.size() < 2 || cells.size() > 3) {
      throw MalformedInput(source + ": expected name<TAB>alpha2[<TAB>provenance]", line_no);
    }
    auto country = CountryLabel::try_parse(text::trim(cells[1]));
    if (!country || country->is_other()) {
      throw MalformedInput(source + ": invalid country code '" + std::string(cells[1]) + "'", line_no);
    }
    if (text::normalize_place(cells[0]).empty()) throw MalformedInput(source + ": empty place name", line_no);
    try {
      gazetteer.add(cells[0], *country, cells.size() == 3 ? std::string(cells[2]) : source);
    } catch (const ConflictingEntry& e) {
      throw ConflictingEntry(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return gazetteer;
}

void Gazetteer::add(std::string_view name, const CountryLabel& country, std::string provenance) {
  if (country.is_other()) throw InvalidArgument("gazetteer entries cannot map to ZZ");
  std::string key = text::normalize_place(name);
  if (key.empty()) throw InvalidArgument("empty gazetteer key");
  auto [it, inserted] = entries_.try_emplace(key, Entry{country, std::move(provenance)});
  if (!inserted && it->second.country != country) {
    throw ConflictingEntry("'" + key + "' maps to both " + it->second.country.code() + " and " + country.code());
  }
  max_tokens_ = std::max(max_tokens_, token_count(key));
}

const Gazetteer::Entry* Gazetteer::find(std::string_view normalized_key) const {
  auto it = entries_.find(std::string(normalized_key));
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<CountryLabel> Gazetteer::match(std::string_view query) const {
  const std::string key = text::normalize_place(query);
  if (key.empty() || entries_.empty()) return std::nullopt;
  if (const Entry* hit = find(key)) return hit->country;

  for (auto segment : text::split(key, ',')) {
    const std::string part(strip_punct(text::trim(segment)));
    if (part.empty() || part.size() == key.size()) continue;
    if (const Entry* hit = find(part)) return hit->country;
  }

  const auto tokens = tokenize(key);
  for (std::size_t n = std::min(max_tokens_, tokens.size()); n >= 1; --n) {
    for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
      if (n == 1 && (tokens[start].size() < 3 || is_stopword(tokens[start]))) continue;
      std::string candidate = tokens[start];
      for (std::size_t i = start + 1; i < start + n; ++i) candidate += ' ' + tokens[i];
      if (const Entry* hit = find(candidate)) return hit->country;
    }
  }
  return std::nullopt;
}

}  // namespace geotweet
