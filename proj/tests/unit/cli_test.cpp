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

#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "test_util.hpp"

using nlohmann::json;
namespace cli = geotweet::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result geotweet_cmd(std::vector<std::string> args) {
  args.insert(args.begin(), "geotweet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (testutil::fixture_dir() / name).string(); }

std::vector<std::string> lines_of(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Six countries with a mostly-honest timezone and language.
void write_corpus(const std::filesystem::path& path, int n, unsigned seed) {
  struct Profile {
    const char *code, *tz, *lang, *loc;
  };
  const Profile profiles[] = {{"NL", "Amsterdam", "nl", "Utrecht"},   {"GB", "London", "en", "Manchester"},
                              {"US", "Eastern Time (US & Canada)", "en", "Amazing New York"},
                              {"FR", "Paris", "fr", "Lyon"},           {"JP", "Tokyo", "ja", "Osaka"},
                              {"BR", "Brasilia", "pt", "Sao Paulo"}};
  std::mt19937 rng(seed);
  std::ofstream out(path);
  for (int i = 0; i < n; ++i) {
    const Profile& p = profiles[rng() % 6];
    const Profile& tz = rng() % 5 == 0 ? profiles[rng() % 6] : p;
    json record = {{"id", std::to_string(i)}, {"text", ""},       {"time_zone", tz.tz},
                   {"tweet_language", p.lang}, {"user_location", rng() % 3 == 0 ? "everywhere" : p.loc},
                   {"label", p.code}};
    out << record.dump() << '\n';
  }
}

}  // namespace

TEST_SUITE("cli label") {
  TEST_CASE("two of a hundred lines carry geo information") {
    testutil::TempDir dir;
    {
      std::ofstream in(dir / "raw.ndjson");
      for (int i = 0; i < 100; ++i) {
        json t = {{"id_str", std::to_string(i)}, {"text", "t"}, {"user", {{"lang", "en"}}}};
        if (i == 17) t["place"] = {{"country_code", "NL"}};
        if (i == 42) t["coordinates"] = {{"type", "Point"}, {"coordinates", {-74.0, 40.71}}};
        in << t.dump() << '\n';
      }
    }
    const auto r = geotweet_cmd({"label", "--in", (dir / "raw.ndjson").string(), "--out", (dir / "lab.ndjson").string()});
    REQUIRE(r.code == 0);
    const auto summary = json::parse(r.out);
    CHECK(summary["total"] == 100);
    CHECK(summary["labeled"] == 2);
    CHECK(summary["malformed"] == 0);
    const auto out = lines_of(dir / "lab.ndjson");
    REQUIRE(out.size() == 2);
    CHECK(json::parse(out[0])["label"] == "NL");
    CHECK(json::parse(out[1])["label"] == "US");
    const auto meta = json::parse(testutil::read_file(dir / "lab.ndjson.meta.json"));
    CHECK(meta["summary"] == summary);
    CHECK(meta["config"]["geocoder"] == "gazetteer");
  }

  TEST_CASE("empty file") {
    testutil::TempDir dir;
    testutil::write_file(dir / "empty.ndjson", "");
    const auto r = geotweet_cmd({"label", "--in", (dir / "empty.ndjson").string(), "--out", (dir / "o.ndjson").string()});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out) == json{{"total", 0}, {"labeled", 0}, {"skipped", 0}, {"malformed", 0}});
    CHECK(testutil::read_file(dir / "o.ndjson").empty());
  }

  TEST_CASE("malformed lines are counted, or fatal under --strict") {
    testutil::TempDir dir;
    const auto out = (dir / "o.ndjson").string();
    auto r = geotweet_cmd({"label", "--in", fixture("raw_mixed.ndjson"), "--out", out});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["malformed"] == 1);
    CHECK(json::parse(r.out)["skipped"] == 2);

    r = geotweet_cmd({"label", "--in", fixture("raw_mixed.ndjson"), "--out", out, "--strict"});
    CHECK(r.code == cli::kInput);
    CHECK(r.err.find("line 3") != std::string::npos);
  }
}

TEST_SUITE("cli train/classify") {
  TEST_CASE("three-record model and the reference tweet") {
    testutil::TempDir dir;
    const auto model = (dir / "m.json").string();
    auto r = geotweet_cmd({"train", "--in", fixture("three_labeled.ndjson"), "--model", model});
    REQUIRE(r.code == 0);
    const auto summary = json::parse(r.out);
    CHECK(summary["classes"] == 2);
    CHECK(summary["total_examples"] == 3);
    CHECK(summary["vocabulary"]["timezone"] == 2);

    const auto first = testutil::read_file(model);
    REQUIRE(geotweet_cmd({"train", "--in", fixture("three_labeled.ndjson"), "--model", model}).code == 0);
    CHECK(testutil::read_file(model) == first);
    CHECK(json::parse(first)["config"]["alpha"] == 1.0);

    const auto out = dir / "c.ndjson";
    r = geotweet_cmd({"classify", "--model", model, "--in", fixture("leiden_tweet.ndjson"), "--out", out.string()});
    REQUIRE(r.code == 0);
    const auto record = json::parse(lines_of(out).at(0));
    CHECK(record["predicted"] == "NL");
    CHECK(record["id"] == "360054236417314816");
    CHECK(record["top"].size() == 2);
  }

  TEST_CASE("a record without usable fields gets the prior argmax") {
    testutil::TempDir dir;
    const auto model = (dir / "m.json").string();
    REQUIRE(geotweet_cmd({"train", "--in", fixture("three_labeled.ndjson"), "--model", model}).code == 0);
    testutil::write_file(dir / "bare.ndjson", "{\"id\":\"x\",\"text\":\"\"}\n");
    REQUIRE(geotweet_cmd({"classify", "--model", model, "--in", (dir / "bare.ndjson").string(), "--out",
                          (dir / "o.ndjson").string()})
                .code == 0);
    const auto record = json::parse(lines_of(dir / "o.ndjson").at(0));
    CHECK(record["predicted"] == "NL");
    CHECK(record["diagnostics"] == json::array({"LIMITED_INFORMATION"}));
  }

  TEST_CASE("ten thousand records in, ten thousand lines out, in order, for any --jobs") {
    testutil::TempDir dir;
    const auto model = (dir / "m.json").string();
    REQUIRE(geotweet_cmd({"train", "--in", fixture("three_labeled.ndjson"), "--model", model}).code == 0);
    {
      std::ofstream in(dir / "big.ndjson");
      for (int i = 0; i < 10000; ++i) {
        if (i == 5000) {
          in << "not json\n";
          continue;
        }
        in << json{{"id", std::to_string(i)}, {"text", ""}, {"time_zone", i % 3 ? "Amsterdam" : "London"}}.dump()
           << '\n';
      }
    }
    std::string serial;
    for (const char* jobs : {"1", "4"}) {
      const auto out = dir / (std::string("o") + jobs + ".ndjson");
      const auto r = geotweet_cmd(
          {"classify", "--model", model, "--in", (dir / "big.ndjson").string(), "--out", out.string(), "--jobs", jobs});
      REQUIRE(r.code == 0);
      CHECK(json::parse(r.out)["malformed"] == 1);
      const auto lines = lines_of(out);
      REQUIRE(lines.size() == 10000);
      CHECK(json::parse(lines[3])["predicted"] == "GB");
      CHECK(json::parse(lines[9999])["id"] == "9999");
      CHECK(json::parse(lines[5000])["line"] == 5001);
      if (serial.empty()) {
        serial = testutil::read_file(out);
      } else {
        CHECK(testutil::read_file(out) == serial);
      }
    }
  }

  TEST_CASE("model and input failures map to exit codes") {
    testutil::TempDir dir;
    testutil::write_file(dir / "bad.json", "{\"format\":\"geotweet.naive_bayes\"");
    auto r = geotweet_cmd({"classify", "--model", (dir / "bad.json").string(), "--in", fixture("leiden_tweet.ndjson"),
                           "--out", (dir / "o").string()});
    CHECK(r.code == cli::kModel);
    r = geotweet_cmd({"classify", "--model", (dir / "missing.json").string(), "--in",
                      fixture("leiden_tweet.ndjson"), "--out", (dir / "o").string()});
    CHECK(r.code == cli::kModel);
    r = geotweet_cmd({"train", "--in", (dir / "missing.ndjson").string(), "--model", (dir / "m").string()});
    CHECK(r.code == cli::kInput);
    testutil::write_file(dir / "empty.ndjson", "");
    r = geotweet_cmd({"train", "--in", (dir / "empty.ndjson").string(), "--model", (dir / "m").string()});
    CHECK(r.code == cli::kInput);
    CHECK(r.err.find("error:") == 0);
  }

  TEST_CASE("usage errors") {
    CHECK(geotweet_cmd({}).code == cli::kUsage);
    CHECK(geotweet_cmd({"train", "--bogus"}).code == cli::kUsage);
    CHECK(geotweet_cmd({"train", "--model", "m"}).code == cli::kUsage);
    CHECK(geotweet_cmd({"train", "--in", fixture("three_labeled.ndjson"), "--model", "m", "--kinds", "smell"}).code ==
          cli::kUsage);
    CHECK(geotweet_cmd({"--help"}).code == cli::kOk);
  }

  TEST_CASE("geocoder failures map to their own code") {
    testutil::TempDir dir;
    auto r = geotweet_cmd({"train", "--in", fixture("three_labeled.ndjson"), "--model", (dir / "m").string(),
                           "--gazetteer", (dir / "none.tsv").string()});
    CHECK(r.code == cli::kGeocoder);

    // Nothing listens on port 9 of localhost; every remote call fails.
    testutil::write_file(dir / "one.ndjson",
                         "{\"id\":\"1\",\"text\":\"\",\"user_location\":\"zzqx unknown\",\"label\":\"NL\"}\n"
                         "{\"id\":\"2\",\"text\":\"\",\"user_location\":\"zzqx other\",\"label\":\"GB\"}\n");
    r = geotweet_cmd({"train", "--in", (dir / "one.ndjson").string(), "--model", (dir / "m").string(), "--geocoder",
                      "nominatim", "--remote-url", "http://127.0.0.1:9", "--remote-timeout", "1"});
    CHECK(r.code == cli::kGeocoder);
    CHECK_FALSE(std::filesystem::exists(dir / "m"));
  }

  TEST_CASE("config file values apply and flags override them") {
    testutil::TempDir dir;
    const auto model = (dir / "m.json").string();
    testutil::write_file(dir / "run.conf", "# run settings\nalpha = 0.5\nkinds = timezone\nseed = 9\n");
    auto r = geotweet_cmd({"train", "--config", (dir / "run.conf").string(), "--in", fixture("three_labeled.ndjson"),
                           "--model", model});
    REQUIRE(r.code == 0);
    auto doc = json::parse(testutil::read_file(model));
    CHECK(doc["alpha"] == 0.5);
    CHECK(doc["config"]["kinds"] == "timezone");
    CHECK(doc["config"]["seed"] == 9);

    r = geotweet_cmd({"train", "--config", (dir / "run.conf").string(), "--in", fixture("three_labeled.ndjson"),
                      "--model", model, "--alpha", "2"});
    REQUIRE(r.code == 0);
    doc = json::parse(testutil::read_file(model));
    CHECK(doc["alpha"] == 2.0);
    CHECK(doc["config"]["kinds"] == "timezone");
  }
}

TEST_SUITE("cli evaluate/ablate/report") {
  TEST_CASE("evaluate writes a JSON report with the config echo and is reproducible") {
    testutil::TempDir dir;
    write_corpus(dir / "lab.ndjson", 300, 1);
    const auto report = (dir / "ev.json").string();
    std::vector<std::string> args = {"evaluate", "--in", (dir / "lab.ndjson").string(), "--out", report,
                                     "--csv", (dir / "ev.csv").string(), "--seed", "7"};
    REQUIRE(geotweet_cmd(args).code == 0);
    const auto first = testutil::read_file(report);
    const auto first_csv = testutil::read_file(dir / "ev.csv");
    args.push_back("--jobs");
    args.push_back("3");
    REQUIRE(geotweet_cmd(args).code == 0);
    CHECK(testutil::read_file(report) == first);
    CHECK(testutil::read_file(dir / "ev.csv") == first_csv);

    const auto doc = json::parse(first);
    CHECK(doc["config"]["seed"] == 7);
    CHECK(doc["config"]["run"]["k"] == 10);
    CHECK(doc["config"]["fold_orientation"] == "standard");
    CHECK(first_csv.rfind("# run_config ", 0) == 0);
    CHECK(first_csv.find("country,n_tweets,correct,accuracy\n") != std::string::npos);
  }

  TEST_CASE("paper-literal folds are recorded") {
    testutil::TempDir dir;
    write_corpus(dir / "lab.ndjson", 100, 2);
    REQUIRE(geotweet_cmd({"evaluate", "--in", (dir / "lab.ndjson").string(), "--out", (dir / "ev.json").string(),
                          "--paper-literal-folds"})
                .code == 0);
    const auto doc = json::parse(testutil::read_file(dir / "ev.json"));
    CHECK(doc["config"]["fold_orientation"] == "inverted");
  }

  TEST_CASE("standard preset gives 14 rows in column order") {
    testutil::TempDir dir;
    write_corpus(dir / "lab.ndjson", 200, 3);
    REQUIRE(geotweet_cmd({"ablate", "--in", (dir / "lab.ndjson").string(), "--out", (dir / "ab.json").string(),
                          "--csv", (dir / "ab.csv").string(), "--preset", "standard"})
                .code == 0);
    const auto lines = lines_of(dir / "ab.csv");
    REQUIRE(lines.size() == 16);
    CHECK(lines[1] ==
          "location,timezone,tweet_language,geoparsed,utc_offset,user_language,correct,n,accuracy,mean_fold_accuracy");
    CHECK(lines[2].rfind("x,,,,,,", 0) == 0);
    CHECK(lines[14].rfind("x,x,,x,,,", 0) == 0);
    CHECK(lines[15].rfind("x,x,x,x,x,x,", 0) == 0);
    CHECK(geotweet_cmd({"ablate", "--in", (dir / "lab.ndjson").string(), "--out", (dir / "ab.json").string(),
                        "--preset", "table9"})
              .code == cli::kUsage);
  }

  TEST_CASE("region collapse puts ZZ in the report") {
    testutil::TempDir dir;
    write_corpus(dir / "lab.ndjson", 200, 4);
    REQUIRE(geotweet_cmd({"evaluate", "--in", (dir / "lab.ndjson").string(), "--out", (dir / "ev.json").string(),
                          "--region", "europe"})
                .code == 0);
    const auto doc = json::parse(testutil::read_file(dir / "ev.json"));
    CHECK(doc.dump().find("\"ZZ\"") != std::string::npos);
    CHECK(doc["config"]["run"]["region_hash"].get<std::string>().size() == 16);
    CHECK(geotweet_cmd({"evaluate", "--in", (dir / "lab.ndjson").string(), "--out", (dir / "ev.json").string(),
                        "--region", "atlantis"})
              .code == cli::kUsage);
  }

  TEST_CASE("per-country report layout") {
    testutil::TempDir dir;
    write_corpus(dir / "lab.ndjson", 240, 5);
    REQUIRE(geotweet_cmd({"report", "--per-country", "--in", (dir / "lab.ndjson").string(), "--out",
                          (dir / "r.json").string(), "--csv", (dir / "r.csv").string(), "--region", "europe"})
                .code == 0);
    const auto lines = lines_of(dir / "r.csv");
    REQUIRE(lines.size() == 1 + 1 + 6 + 3);
    CHECK(lines[1] ==
          "country,n_tweets,location+timezone+geoparsed,location+timezone+tweet_language,"
          "location+timezone+tweet_language+geoparsed");
    CHECK(lines[8].rfind("Average,,", 0) == 0);
    CHECK(lines[9].rfind("Standard deviation,,", 0) == 0);
    CHECK(lines[10].rfind("Europe,,", 0) == 0);
    CHECK(geotweet_cmd({"report", "--in", (dir / "lab.ndjson").string(), "--out", (dir / "r.json").string()}).code ==
          cli::kUsage);
  }
}

TEST_SUITE("cli cache") {
  TEST_CASE("stats and compact") {
    testutil::TempDir dir;
    write_corpus(dir / "lab.ndjson", 50, 6);
    const auto cache = (dir / "c.tsv").string();
    REQUIRE(geotweet_cmd({"train", "--in", (dir / "lab.ndjson").string(), "--model", (dir / "m").string(), "--cache",
                          cache})
                .code == 0);
    auto r = geotweet_cmd({"cache", "stats", "--cache", cache});
    REQUIRE(r.code == 0);
    const auto stats = json::parse(r.out);
    CHECK(stats["entries"] == 7);
    CHECK(stats["negatives"] == 1);
    r = geotweet_cmd({"cache", "compact", "--cache", cache});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["entries"] == 7);
    CHECK(geotweet_cmd({"cache", "stats", "--cache", (dir / "none.tsv").string()}).code == cli::kInput);
    CHECK(geotweet_cmd({"cache"}).code == cli::kUsage);
  }
}
