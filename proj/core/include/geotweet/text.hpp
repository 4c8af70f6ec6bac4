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
#include <string>
#include <string_view>
#include <vector>

// Byte-level string helpers. Case folding is ASCII only; UTF-8 multibyte
// sequences pass through untouched.
namespace geotweet::text {

bool is_space(char c) noexcept;

std::string ascii_lower(std::string_view s);
std::string ascii_upper(std::string_view s);

std::string_view trim(std::string_view s) noexcept;

// Trims and collapses every internal whitespace run to a single space.
std::string collapse_whitespace(std::string_view s);

// Normalized form shared by the Location feature and gazetteer keys.
std::string normalize_place(std::string_view s, bool fold_case = true);

// Splits on `sep`, keeping empty pieces.
std::vector<std::string_view> split(std::string_view s, char sep);

// Escapes '\\', '\t', '\n' and '\r' so a value fits in one TSV cell.
std::string escape_tsv(std::string_view s);
std::string unescape_tsv(std::string_view s);

// 64-bit FNV-1a; used for config and fold fingerprints.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);

// printf-style fixed-point rendering ("%.*f").
std::string fixed(double value, int decimals);

}  // namespace geotweet::text
