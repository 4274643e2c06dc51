#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "omtl/eeg.hpp"
#include "omtl/harness.hpp"
#include "omtl/learner.hpp"
#include "omtl/linalg.hpp"
#include "omtl/log.hpp"
#include "omtl/relatedness.hpp"

namespace {

omtl::SymMatrix random_spd(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  omtl::Matrix m(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = g(rng);
  omtl::Matrix a = m * m.transpose();
  for (std::size_t i = 0; i < k; ++i) a(i, i) += 0.1;
  return omtl::symmetrize(a);
}

void BM_EigSym(benchmark::State& state) {
  const auto a = random_spd(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(omtl::eig_sym(a));
}
BENCHMARK(BM_EigSym)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_SpdLogExp(benchmark::State& state) {
  const auto a = random_spd(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(omtl::sym_exp(omtl::spd_log(a)));
}
BENCHMARK(BM_SpdLogExp)->Arg(4)->Arg(8);

void BM_RelatednessUpdate(benchmark::State& state) {
  const auto method = static_cast<omtl::Method>(state.range(0));
  const std::size_t k = 4, d = 20;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  omtl::WeightMatrix w(d, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < d; ++i) w(i, j) = g(rng);
  const auto prev = omtl::initial_interaction(method, k);
  const auto prev_inv = omtl::spd_inverse(prev);
  const omtl::RelatednessRule rule{method};
  for (auto _ : state) benchmark::DoNotOptimize(omtl::update_relatedness(rule, w, prev, prev_inv));
  state.SetLabel(std::string(omtl::to_string(method)));
}
BENCHMARK(BM_RelatednessUpdate)
    ->Arg(static_cast<int>(omtl::Method::BatchOPT))
    ->Arg(static_cast<int>(omtl::Method::OMTLCOV))
    ->Arg(static_cast<int>(omtl::Method::OMTLLOG))
    ->Arg(static_cast<int>(omtl::Method::OMTLVON));

void BM_RunStream(benchmark::State& state) {
  omtl::log::set_level(omtl::log::Level::Quiet);
  const auto method = static_cast<omtl::Method>(state.range(0));
  const auto ds = omtl::synth_related_tasks({});
  omtl::LearnerConfig cfg;
  cfg.method = method;
  cfg.tasks = ds.tasks;
  cfg.dim = ds.dim;
  cfg.total_rounds = ds.size();
  for (auto _ : state) benchmark::DoNotOptimize(omtl::run_stream(ds.examples, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.size()));
  state.SetLabel(std::string(omtl::to_string(method)));
}
BENCHMARK(BM_RunStream)
    ->Arg(static_cast<int>(omtl::Method::CMTL))
    ->Arg(static_cast<int>(omtl::Method::OMTLCOV))
    ->Arg(static_cast<int>(omtl::Method::OMTLLOG))
    ->Arg(static_cast<int>(omtl::Method::OMTLVON))
    ->Unit(benchmark::kMicrosecond);

void BM_WelchPsd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = std::sin(2.0 * std::numbers::pi * 10.0 * double(t) / 128.0);
  for (auto _ : state) benchmark::DoNotOptimize(omtl::eeg::welch_psd(x, 128.0));
}
BENCHMARK(BM_WelchPsd)->Arg(128)->Arg(1024)->Arg(8192);

void BM_ExtractFeatures14(benchmark::State& state) {
  omtl::eeg::SignalWindow w;
  w.labels = {"AF3", "F7", "F3", "FC5", "T7", "P7", "O1", "O2", "P8", "T8", "FC6", "F4", "F8", "AF4"};
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (std::size_t c = 0; c < w.labels.size(); ++c) {
    std::vector<double> ch(128);
    for (double& v : ch) v = g(rng);
    w.channels.push_back(std::move(ch));
  }
  for (auto _ : state) benchmark::DoNotOptimize(omtl::eeg::extract_features(w));
}
BENCHMARK(BM_ExtractFeatures14);

}  // namespace

BENCHMARK_MAIN();
