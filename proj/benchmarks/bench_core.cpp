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


#include <benchmark/benchmark.h>

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "geotweet/bayes.hpp"
#include "geotweet/eval.hpp"
#include "geotweet/geocode.hpp"

using namespace geotweet;

namespace {

// Synthetic corpus with a realistic spread of values per kind.
std::vector<LabeledFeatures> corpus(std::size_t n) {
  static const char* kCodes[] = {"US", "GB", "NL", "CA", "IE", "AU", "ZA", "ES", "FR", "ID",
                                 "NO", "SE", "DE", "BE", "IT", "FI", "DK", "MX", "NZ", "MY"};
  std::mt19937_64 rng(42);
  std::vector<LabeledFeatures> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = rng() % 20;
    FeatureVector f;
    f.set(FeatureKind::Timezone, "tz" + std::to_string((c + rng() % 3) % 40));
    f.set(FeatureKind::Location, "loc" + std::to_string(rng() % 2000));
    f.set(FeatureKind::TweetLanguage, "l" + std::to_string(c % 8));
    f.set(FeatureKind::Geoparsed, kCodes[(c + (rng() % 5 == 0)) % 20]);
    f.set(FeatureKind::UtcOffset, std::to_string(3600 * static_cast<int>(c % 12)));
    f.set(FeatureKind::UserLanguage, "l" + std::to_string(rng() % 8));
    out.push_back({std::move(f), CountryLabel(kCodes[c])});
  }
  return out;
}

void BM_Train(benchmark::State& state) {
  const auto data = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(train(data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Train)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_LogPosterior(benchmark::State& state) {
  const auto data = corpus(50000);
  const auto model = train(data);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_posterior(model, data[i].features));
    i = (i + 1) % data.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LogPosterior);

void BM_KfoldSplit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kfold_split(n, 10, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KfoldSplit)->Arg(1000)->Arg(100000);

void BM_CrossValidate(benchmark::State& state) {
  const auto data = corpus(static_cast<std::size_t>(state.range(0)));
  CvConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(cross_validate(data, config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CrossValidate)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ReverseGeocode(benchmark::State& state) {
  const std::filesystem::path dir = GEOTWEET_DATA_DIR;
  static const BoundaryIndex boundaries = BoundaryIndex::load(dir / "boundaries.tsv");
  static const PlaceIndex places = PlaceIndex::load(dir / "places.tsv");
  Geocoder geocoder(Gazetteer{}, boundaries, places, std::make_shared<GeocodeCache>());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-60, 70), lon(-180, 180);
  for (auto _ : state) {
    // Random points almost never share a 1e-4 cache cell.
    benchmark::DoNotOptimize(geocoder.reverse_geocode(lat(rng), lon(rng)));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ReverseGeocode);

}  // namespace

BENCHMARK_MAIN();
