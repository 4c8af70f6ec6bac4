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

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace geotweet {

/// ISO 3166-1 alpha-2 class label. Always two uppercase ASCII letters;
/// "ZZ" is reserved for the collapsed "Other" class.
class CountryLabel {
 public:
  /// Accepts two ASCII letters in either case. Throws InvalidArgument otherwise.
  explicit CountryLabel(std::string_view code);

  /// Returns nullopt instead of throwing.
  static std::optional<CountryLabel> try_parse(std::string_view code);

  static CountryLabel other() { return CountryLabel(std::string("ZZ"), Unchecked{}); }

  const std::string& code() const noexcept { return code_; }
  bool is_other() const noexcept { return code_ == "ZZ"; }

  friend auto operator<=>(const CountryLabel&, const CountryLabel&) = default;
  friend bool operator==(const CountryLabel&, const CountryLabel&) = default;

 private:
  struct Unchecked {};
  CountryLabel(std::string code, Unchecked) : code_(std::move(code)) {}

  std::string code_;
};

}  // namespace geotweet

template <>
struct std::hash<geotweet::CountryLabel> {
  std::size_t operator()(const geotweet::CountryLabel& label) const noexcept {
    return std::hash<std::string>{}(label.code());
  }
};
