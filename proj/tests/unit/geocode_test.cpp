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


#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "geotweet/error.hpp"
#include "geotweet/geocode.hpp"
#include "geotweet/http_geocoder.hpp"
#include "test_util.hpp"

using namespace geotweet;

namespace {

class StubRemote : public RemoteGeocoder {
 public:
  std::map<std::string, std::string, std::less<>> answers;  // query -> code
  std::optional<CountryLabel> reverse_answer;
  bool fail = false;
  std::chrono::milliseconds delay{0};
  std::atomic<int> forward_calls{0};
  std::atomic<int> reverse_calls{0};
  std::atomic<int> active{0};
  std::atomic<int> peak{0};

  std::optional<CountryLabel> forward(std::string_view query) override {
    ++forward_calls;
    Track t(*this);
    if (fail) throw RemoteUnavailable("stub down");
    auto it = answers.find(query);
    if (it == answers.end()) return std::nullopt;
    return CountryLabel(it->second);
  }
  std::optional<CountryLabel> reverse(double, double) override {
    ++reverse_calls;
    Track t(*this);
    if (fail) throw RemoteUnavailable("stub down");
    return reverse_answer;
  }
  std::string name() const override { return "stub"; }

 private:
  struct Track {
    StubRemote& s;
    explicit Track(StubRemote& stub) : s(stub) {
      int now = ++s.active;
      int seen = s.peak.load();
      while (now > seen && !s.peak.compare_exchange_weak(seen, now)) {
      }
      if (s.delay.count() > 0) std::this_thread::sleep_for(s.delay);
    }
    ~Track() { --s.active; }
  };
};

Gazetteer gazetteer_from(const std::string& text) {
  std::istringstream in(text);
  return Gazetteer::parse(in);
}

Geocoder offline(Gazetteer gazetteer, std::shared_ptr<RemoteGeocoder> remote = nullptr,
                 std::shared_ptr<GeocodeCache> cache = nullptr, GeocoderOptions options = {}) {
  return Geocoder(std::move(gazetteer), BoundaryIndex{}, PlaceIndex{},
                  cache ? cache : std::make_shared<GeocodeCache>(), std::move(remote), options);
}

Geocoder bundled() {
  static const BoundaryIndex boundaries = BoundaryIndex::load(testutil::data_dir() / "boundaries.tsv");
  static const PlaceIndex places = PlaceIndex::load(testutil::data_dir() / "places.tsv");
  static const Gazetteer gazetteer = Gazetteer::load(testutil::data_dir() / "gazetteer.tsv");
  return Geocoder(gazetteer, boundaries, places, std::make_shared<GeocodeCache>());
}

}  // namespace

TEST_SUITE("gazetteer") {
  TEST_CASE("two entries load with size 2") {
    auto g = gazetteer_from("enschede\tNL\nparis\tFR\n");
    CHECK(g.size() == 2);
    REQUIRE(g.find("paris") != nullptr);
    CHECK(g.find("paris")->country == CountryLabel("FR"));
  }

  TEST_CASE("conflicting duplicate is rejected") {
    CHECK_THROWS_AS(gazetteer_from("paris\tFR\nparis\tUS\n"), ConflictingEntry);
    CHECK_NOTHROW(gazetteer_from("paris\tFR\nParis \tFR\n"));
  }

  TEST_CASE("empty file gives an empty gazetteer that always misses") {
    testutil::TempDir dir;
    testutil::write_file(dir / "empty.tsv", "");
    auto g = Gazetteer::load(dir / "empty.tsv");
    CHECK(g.empty());
    CHECK_FALSE(g.match("Amsterdam").has_value());
    auto geocoder = offline(std::move(g));
    CHECK_FALSE(geocoder.forward_geocode("Amsterdam").has_value());
  }

  TEST_CASE("keys are normalized like the location feature") {
    auto g = gazetteer_from("# comment\n  New   YORK \tUS\n");
    CHECK(g.find("new york") != nullptr);
  }

  TEST_CASE("sentinel and malformed lines") {
    CHECK_THROWS_AS(gazetteer_from("nowhere\tZZ\n"), MalformedInput);
    Gazetteer g;
    CHECK_THROWS_AS(g.add("nowhere", CountryLabel::other()), InvalidArgument);
    try {
      gazetteer_from("ok\tNL\nbroken line\n");
      FAIL("expected MalformedInput");
    } catch (const MalformedInput& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("free-text matching") {
    auto g = gazetteer_from("new york\tUS\namsterdam\tNL\nyork\tGB\n");
    CHECK(g.match("Amazing New York") == CountryLabel("US"));
    CHECK(g.match("Amsterdam, the Netherlands") == CountryLabel("NL"));
    CHECK_FALSE(g.match("on the moon").has_value());
  }
}

TEST_SUITE("forward_geocode") {
  TEST_CASE("Amazing New York resolves through the bundled gazetteer") {
    auto g = bundled();
    CHECK(g.forward_geocode("Amazing New York") == CountryLabel("US"));
    CHECK(g.forward_geocode("Awesome Enschede") == CountryLabel("NL"));
  }

  TEST_CASE("on the moon is absent and cached as a negative") {
    auto remote = std::make_shared<StubRemote>();
    auto cache = std::make_shared<GeocodeCache>();
    auto g = offline(Gazetteer::load(testutil::data_dir() / "gazetteer.tsv"), remote, cache);
    CHECK_FALSE(g.forward_geocode("on the moon").has_value());
    CHECK(remote->forward_calls == 1);
    auto entry = cache->lookup("on the moon");
    REQUIRE(entry.has_value());
    CHECK_FALSE(entry->outcome.has_value());
    CHECK(entry->source == GeocodeSource::Remote);
    CHECK(cache->stats().negatives == 1);
  }

  TEST_CASE("gazetteer hit never calls the remote") {
    auto remote = std::make_shared<StubRemote>();
    auto cache = std::make_shared<GeocodeCache>();
    auto g = offline(gazetteer_from("amsterdam, nl\tNL\n"), remote, cache);
    CHECK(g.forward_geocode("Amsterdam, NL") == CountryLabel("NL"));
    CHECK(remote->forward_calls == 0);
    CHECK(cache->lookup("Amsterdam, NL")->source == GeocodeSource::Gazetteer);
  }

  TEST_CASE("remote answers when the gazetteer misses") {
    auto remote = std::make_shared<StubRemote>();
    remote->answers["Nieuw Amsterdam"] = "SR";
    auto g = offline(Gazetteer{}, remote);
    CHECK(g.forward_geocode("Nieuw Amsterdam") == CountryLabel("SR"));
  }

  TEST_CASE("coherence: repeated query consults resolvers once") {
    auto remote = std::make_shared<StubRemote>();
    remote->answers["somewhere"] = "BE";
    auto cache = std::make_shared<GeocodeCache>();
    auto g = offline(Gazetteer{}, remote, cache);
    for (const char* q : {"somewhere", "elsewhere"}) {
      auto first = g.forward_geocode(q);
      auto second = g.forward_geocode(q);
      CHECK(first == second);
    }
    CHECK(remote->forward_calls == 2);
    CHECK(cache->stats().hits == 2);
    CHECK(cache->stats().misses == 2);
  }

  TEST_CASE("remote failure surfaces and is not cached") {
    auto remote = std::make_shared<StubRemote>();
    remote->fail = true;
    auto cache = std::make_shared<GeocodeCache>();
    auto g = offline(Gazetteer{}, remote, cache);
    CHECK_THROWS_AS(g.forward_geocode("somewhere"), RemoteUnavailable);
    CHECK(cache->size() == 0);
    remote->fail = false;
    remote->answers["somewhere"] = "BE";
    CHECK(g.forward_geocode("somewhere") == CountryLabel("BE"));
  }

  TEST_CASE("blank query is rejected") {
    auto g = offline(Gazetteer{});
    CHECK_THROWS_AS(g.forward_geocode(""), InvalidQuery);
    CHECK_THROWS_AS(g.forward_geocode(" \t "), InvalidQuery);
  }

  TEST_CASE("remote calls respect max_in_flight") {
    for (std::size_t limit : {std::size_t{1}, std::size_t{3}}) {
      auto remote = std::make_shared<StubRemote>();
      remote->delay = std::chrono::milliseconds(5);
      GeocoderOptions options;
      options.max_in_flight = limit;
      auto g = offline(Gazetteer{}, remote, nullptr, options);
      std::vector<std::thread> threads;
      for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&g, t] {
          for (int i = 0; i < 4; ++i) g.forward_geocode("q" + std::to_string(t) + "-" + std::to_string(i));
        });
      }
      for (auto& th : threads) th.join();
      CHECK(remote->forward_calls == 32);
      CHECK(remote->peak.load() <= static_cast<int>(limit));
    }
    GeocoderOptions zero;
    zero.max_in_flight = 0;
    CHECK_THROWS_AS(offline(Gazetteer{}, nullptr, nullptr, zero), InvalidArgument);
  }

  TEST_CASE("same key from many threads resolves once") {
    auto remote = std::make_shared<StubRemote>();
    remote->answers["contested"] = "FR";
    remote->delay = std::chrono::milliseconds(2);
    GeocoderOptions options;
    options.max_in_flight = 4;
    auto g = offline(Gazetteer{}, remote, nullptr, options);
    std::vector<std::thread> threads;
    for (int t = 0; t < 6; ++t) threads.emplace_back([&g] { g.forward_geocode("contested"); });
    for (auto& th : threads) th.join();
    CHECK(remote->forward_calls == 1);
  }
}

TEST_SUITE("reverse_geocode") {
  // Expected countries cross-checked against an independent nearest-city
  // table (GeoNames cities1000) before the boundary fixture was frozen.
  TEST_CASE("bundled fixtures resolve known points") {
    struct Case {
      double lat, lon;
      const char* code;
    };
    const Case cases[] = {
        {52.1674, 4.4843, "NL"},    {40.71, -74.00, "US"},     {52.2215, 6.8937, "NL"},
        {1.3521, 103.8198, "SG"},   {48.8566, 2.3522, "FR"},   {52.52, 13.405, "DE"},
        {35.6762, 139.6503, "JP"},  {-33.8688, 151.2093, "AU"}, {-23.5505, -46.6333, "BR"},
        {19.076, 72.8777, "IN"},    {-1.2921, 36.8219, "KE"},  {53.3498, -6.2603, "IE"},
        {50.8503, 4.3517, "BE"},    {43.6532, -79.3832, "CA"}, {-34.6037, -58.3816, "AR"},
    };
    auto g = bundled();
    for (const auto& c : cases) {
      CAPTURE(c.lat);
      CAPTURE(c.lon);
      CHECK(g.reverse_geocode(c.lat, c.lon) == CountryLabel(c.code));
    }
  }

  TEST_CASE("ocean points are absent") {
    auto g = bundled();
    CHECK_FALSE(g.reverse_geocode(0.0, 0.0).has_value());
    CHECK_FALSE(g.reverse_geocode(-40.0, -120.0).has_value());
  }

  TEST_CASE("nearest place covers coastline gaps") {
    std::istringstream places("1.29\t103.85\tSG\tSingapore\n");
    Geocoder g(Gazetteer{}, BoundaryIndex{}, PlaceIndex::parse(places), std::make_shared<GeocodeCache>());
    CHECK(g.reverse_geocode(1.30, 103.84) == CountryLabel("SG"));
    CHECK_FALSE(g.reverse_geocode(3.0, 103.84).has_value());
  }

  TEST_CASE("out-of-range coordinates") {
    auto g = offline(Gazetteer{});
    CHECK_THROWS_AS(g.reverse_geocode(91.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(g.reverse_geocode(0.0, -180.5), InvalidArgument);
    CHECK_THROWS_AS(g.reverse_geocode(std::nan(""), 0.0), InvalidArgument);
  }

  TEST_CASE("remote is the last resort") {
    auto remote = std::make_shared<StubRemote>();
    remote->reverse_answer = CountryLabel("PN");
    auto g = offline(Gazetteer{}, remote);
    CHECK(g.reverse_geocode(-25.07, -130.1) == CountryLabel("PN"));
    CHECK(remote->reverse_calls == 1);
  }

  TEST_CASE("points in one rounding cell share a cache entry") {
    auto remote = std::make_shared<StubRemote>();
    remote->reverse_answer = CountryLabel("PN");
    auto cache = std::make_shared<GeocodeCache>();
    auto g = offline(Gazetteer{}, remote, cache);
    CHECK(reverse_cache_key(52.16741, 4.48431) == "@52.1674,4.4843");
    CHECK(reverse_cache_key(52.167449, 4.484349) == "@52.1674,4.4843");
    CHECK(reverse_cache_key(-0.00001, 0.0) == "@0.0000,0.0000");
    g.reverse_geocode(-25.07001, -130.10002);
    g.reverse_geocode(-25.07004, -130.09998);
    CHECK(remote->reverse_calls == 1);
    CHECK(cache->size() == 1);
  }

  TEST_CASE("polygon holes via even-odd") {
    std::istringstream rings(
        "ZA\t0\t0,0 10,0 10,10 0,10\n"
        "ZA\t1\t4,4 6,4 6,6 4,6\n"
        "LS\t0\t4,4 6,4 6,6 4,6\n");
    auto b = BoundaryIndex::parse(rings);
    CHECK(b.locate(2, 2) == CountryLabel("ZA"));
    CHECK(b.locate(5, 5) == CountryLabel("LS"));
    CHECK_FALSE(b.locate(20, 20).has_value());
  }
}

TEST_SUITE("cache") {
  TEST_CASE("file persistence, last entry wins, compact") {
    testutil::TempDir dir;
    const auto path = dir / "cache.tsv";
    int tick = 0;
    auto clock = [&tick] { return "2026-01-01T00:00:0" + std::to_string(tick++) + "Z"; };
    {
      GeocodeCache cache(path, clock);
      cache.store("amsterdam", {CountryLabel("NL"), GeocodeSource::Gazetteer, ""});
      cache.store("on the moon", {std::nullopt, GeocodeSource::Remote, ""});
      cache.store("tab\there", {CountryLabel("BE"), GeocodeSource::Remote, ""});
      cache.store("amsterdam", {CountryLabel("US"), GeocodeSource::Remote, ""});
    }
    const auto raw = testutil::read_file(path);
    CHECK(raw.find("on the moon\t-\tremote\t2026-01-01T00:00:01Z\n") != std::string::npos);
    CHECK(raw.find("tab\\there\tBE") != std::string::npos);

    GeocodeCache reloaded(path);
    CHECK(reloaded.size() == 3);
    CHECK(reloaded.lookup("amsterdam")->outcome == CountryLabel("US"));
    CHECK(reloaded.lookup("tab\there")->outcome == CountryLabel("BE"));
    const auto stats = cache_stats(reloaded);
    CHECK(stats.entries == 3);
    CHECK(stats.negatives == 1);
    CHECK(stats.positives == 2);
    CHECK(stats.from_remote == 3);
    CHECK(stats.hits == 2);

    reloaded.compact();
    const auto compacted = testutil::read_file(path);
    CHECK(std::count(compacted.begin(), compacted.end(), '\n') == 3);
    GeocodeCache again(path);
    CHECK(again.lookup("amsterdam")->outcome == CountryLabel("US"));
    CHECK(again.lookup("amsterdam")->timestamp == "2026-01-01T00:00:03Z");
  }

  TEST_CASE("cache survives across geocoder instances") {
    testutil::TempDir dir;
    auto remote = std::make_shared<StubRemote>();
    remote->answers["somewhere"] = "BE";
    {
      auto g = offline(Gazetteer{}, remote, std::make_shared<GeocodeCache>(dir / "c.tsv"));
      g.forward_geocode("somewhere");
      g.forward_geocode("nowhere");
    }
    auto g = offline(Gazetteer{}, remote, std::make_shared<GeocodeCache>(dir / "c.tsv"));
    CHECK(g.forward_geocode("somewhere") == CountryLabel("BE"));
    CHECK_FALSE(g.forward_geocode("nowhere").has_value());
    CHECK(remote->forward_calls == 2);
  }

  TEST_CASE("corrupt cache line reports its line number") {
    testutil::TempDir dir;
    testutil::write_file(dir / "c.tsv", "a\tNL\tgazetteer\t2026-01-01T00:00:00Z\nbad line\n");
    try {
      GeocodeCache cache(dir / "c.tsv");
      FAIL("expected MalformedInput");
    } catch (const MalformedInput& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("timestamp format") {
    const auto now = GeocodeCache::utc_now_iso8601();
    CHECK(now.size() == 20);
    CHECK(now[10] == 'T');
    CHECK(now.back() == 'Z');
  }
}

TEST_SUITE("http adapter") {
  TEST_CASE("nominatim-style responses against a local server") {
    httplib::Server server;
    std::string seen_key;
    server.Get("/nom/search", [&](const httplib::Request& req, httplib::Response& res) {
      seen_key = req.get_param_value("key");
      if (req.get_param_value("q") == "Leiden") {
        res.set_content(R"([{"address":{"country_code":"nl"}}])", "application/json");
      } else if (req.get_param_value("q") == "boom") {
        res.status = 503;
      } else {
        res.set_content("[]", "application/json");
      }
    });
    server.Get("/nom/reverse", [](const httplib::Request& req, httplib::Response& res) {
      if (req.get_param_value("lat") == "52.167400") {
        res.set_content(R"({"address":{"country_code":"nl"}})", "application/json");
      } else {
        res.set_content(R"({"error":"Unable to geocode"})", "application/json");
      }
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ::setenv("GEOTWEET_TEST_GEOCODER_KEY", "s3cret", 1);
    HttpGeocoderConfig config;
    config.base_url = "http://127.0.0.1:" + std::to_string(port) + "/nom/";
    config.credential_env = "GEOTWEET_TEST_GEOCODER_KEY";
    config.timeout_seconds = 2;
    HttpGeocoder http(config);
    CHECK(http.forward("Leiden") == CountryLabel("NL"));
    CHECK(seen_key == "s3cret");
    CHECK_FALSE(http.forward("on the moon").has_value());
    CHECK_THROWS_AS(http.forward("boom"), RemoteUnavailable);
    CHECK(http.reverse(52.1674, 4.4843) == CountryLabel("NL"));
    CHECK_FALSE(http.reverse(0.0, 0.0).has_value());

    config.credential_env = "GEOTWEET_TEST_GEOCODER_MISSING";
    ::unsetenv("GEOTWEET_TEST_GEOCODER_MISSING");
    CHECK_THROWS_AS(HttpGeocoder(config).forward("Leiden"), RemoteUnavailable);

    server.stop();
    runner.join();

    config.credential_env.clear();
    config.timeout_seconds = 0.5;
    CHECK_THROWS_AS(HttpGeocoder(config).forward("Leiden"), RemoteUnavailable);
  }

  TEST_CASE("only http URLs are accepted") {
    HttpGeocoderConfig config;
    config.base_url = "https://example.org";
    CHECK_THROWS_AS(HttpGeocoder{config}, InvalidArgument);
  }
}
