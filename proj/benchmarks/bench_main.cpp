#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "zest/annealing.hpp"
#include "zest/estimators.hpp"
#include "zest/proposal.hpp"
#include "zest/running_example.hpp"

namespace {

using namespace zest;

// K_eff saturates near N, so z_bh flattens out while z_rb keeps growing with K.
void BM_ZBh(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  GaussianGridFamily family(K, 0.5, 2.0);
  StandardNormalTarget target;
  RngStream rng(1);
  const auto sample = draw_labeled_sample(family, 500, rng);
  for (auto _ : state) benchmark::DoNotOptimize(z_bh(sample, target, family).log_z_hat);
  state.counters["K_eff"] = static_cast<double>(k_eff(counts_from_sample(sample)));
}
BENCHMARK(BM_ZBh)->RangeMultiplier(10)->Range(30, 30000)->Unit(benchmark::kMicrosecond);

void BM_ZRb(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  GaussianGridFamily family(K, 0.5, 2.0);
  StandardNormalTarget target;
  RngStream rng(1);
  const auto sample = draw_labeled_sample(family, 500, rng);
  for (auto _ : state) benchmark::DoNotOptimize(z_rb(sample, target, family).log_z_hat);
}
BENCHMARK(BM_ZRb)->RangeMultiplier(10)->Range(30, 30000)->Unit(benchmark::kMicrosecond);

void BM_LogWeightedSum(benchmark::State& state) {
  const auto terms_count = static_cast<std::size_t>(state.range(0));
  GaussianGridFamily family(terms_count, 0.5, 2.0);
  std::vector<LabelWeight> terms;
  for (std::size_t l = 0; l < terms_count; ++l) terms.push_back({static_cast<Label>(l), 0.0});
  const double x[1] = {0.3};
  for (auto _ : state) benchmark::DoNotOptimize(family.log_weighted_sum(x, terms, 0.5));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(terms_count));
}
BENCHMARK(BM_LogWeightedSum)->RangeMultiplier(8)->Range(8, 4096);

void BM_AisModified(benchmark::State& state) {
  GaussianGridFamily family(300, 0.5, 2.0);
  StandardNormalTarget target;
  AisOptions opts;
  opts.schedule = linear_schedule(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RngStream rng(++seed);
    benchmark::DoNotOptimize(ais_modified(100, opts, family, target, rng).log_z_hat);
  }
}
BENCHMARK(BM_AisModified)->Arg(1)->Arg(5)->Arg(21)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
