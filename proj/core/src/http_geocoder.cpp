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

#include "geotweet/http_geocoder.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "geotweet/error.hpp"
#include "geotweet/text.hpp"

namespace geotweet {
namespace {

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
        c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

std::optional<CountryLabel> country_of(const nlohmann::json& place) {
  if (!place.is_object()) return std::nullopt;
  auto address = place.find("address");
  if (address == place.end() || !address->is_object()) return std::nullopt;
  auto code = address->find("country_code");
  if (code == address->end() || !code->is_string()) return std::nullopt;
  auto label = CountryLabel::try_parse(code->get<std::string>());
  if (label && label->is_other()) return std::nullopt;
  return label;
}

}  // namespace

HttpGeocoder::HttpGeocoder(HttpGeocoderConfig config) : config_(std::move(config)) {
  const std::string& url = config_.base_url;
  if (url.rfind("http://", 0) != 0) throw InvalidArgument("geocoder base URL must start with http://: " + url);
  auto slash = url.find('/', 7);
  scheme_host_port_ = url.substr(0, slash);
  path_prefix_ = slash == std::string::npos ? "" : url.substr(slash);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::optional<CountryLabel> HttpGeocoder::get(const std::string& path_and_query) {
  std::string target = path_prefix_ + path_and_query;
  if (!config_.credential_env.empty()) {
    const char* secret = std::getenv(config_.credential_env.c_str());
    if (secret == nullptr || *secret == '\0') {
      throw RemoteUnavailable("credential variable " + config_.credential_env + " is not set");
    }
    target += "&" + config_.credential_param + "=" + url_encode(secret);
  }

  httplib::Client client(scheme_host_port_);
  const auto sec = static_cast<time_t>(config_.timeout_seconds);
  const auto usec = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(sec)) * 1e6);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_default_headers({{"User-Agent", config_.user_agent}});

  auto result = client.Get(target);
  if (!result) throw RemoteUnavailable("geocoder request failed: " + httplib::to_string(result.error()));
  if (result->status != 200) {
    throw RemoteUnavailable("geocoder returned HTTP " + std::to_string(result->status));
  }

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::parse_error&) {
    throw RemoteUnavailable("geocoder returned invalid JSON");
  }
  if (body.is_array()) return body.empty() ? std::nullopt : country_of(body.front());
  return country_of(body);
}

std::optional<CountryLabel> HttpGeocoder::forward(std::string_view query) {
  return get("/search?q=" + url_encode(query) + "&format=jsonv2&addressdetails=1&limit=1");
}

std::optional<CountryLabel> HttpGeocoder::reverse(double latitude, double longitude) {
  return get("/reverse?lat=" + text::fixed(latitude, 6) + "&lon=" + text::fixed(longitude, 6) + "&format=jsonv2");
}

}  // namespace geotweet
