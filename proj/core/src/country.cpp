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

#include "geotweet/country.hpp"

#include "geotweet/error.hpp"

namespace geotweet {
namespace {

bool is_ascii_alpha(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

}  // namespace

CountryLabel::CountryLabel(std::string_view code) {
  auto parsed = try_parse(code);
  if (!parsed) {
    throw InvalidArgument("not an ISO 3166-1 alpha-2 code: '" + std::string(code) + "'");
  }
  code_ = std::move(parsed->code_);
}

std::optional<CountryLabel> CountryLabel::try_parse(std::string_view code) {
  if (code.size() != 2 || !is_ascii_alpha(code[0]) || !is_ascii_alpha(code[1])) {
    return std::nullopt;
  }
  std::string upper{static_cast<char>(code[0] & ~0x20), static_cast<char>(code[1] & ~0x20)};
  return CountryLabel(std::move(upper), Unchecked{});
}

}  // namespace geotweet
