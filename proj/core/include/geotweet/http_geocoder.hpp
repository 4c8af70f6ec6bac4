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

#include <string>

#include "geotweet/geocode.hpp"

namespace geotweet {

struct HttpGeocoderConfig {
  std::string base_url;             // e.g. "http://localhost:8080" or "http://host/nominatim"
  std::string credential_env;       // env var holding an API key; empty = none
  std::string credential_param = "key";
  double timeout_seconds = 10.0;
  std::string user_agent = "geotweet/0.1";
};

/// Nominatim-compatible JSON adapter:
///   GET <base>/search?q=...&format=jsonv2&addressdetails=1&limit=1
///   GET <base>/reverse?lat=...&lon=...&format=jsonv2
/// The country is read from `address.country_code`. Transport errors and
/// non-200 statuses raise RemoteUnavailable; empty results mean "no place".
/// Only plain http:// endpoints are supported.
class HttpGeocoder : public RemoteGeocoder {
 public:
  explicit HttpGeocoder(HttpGeocoderConfig config);

  std::optional<CountryLabel> forward(std::string_view query) override;
  std::optional<CountryLabel> reverse(double latitude, double longitude) override;
  std::string name() const override { return "http:" + config_.base_url; }

 private:
  std::optional<CountryLabel> get(const std::string& path_and_query);

  HttpGeocoderConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

}  // namespace geotweet
