// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include <numeric>

#include "padback/dataset.hpp"
#include "padback/kernels.hpp"
#include "padback/rng.hpp"

namespace {

using namespace padback;

struct Fixture {
  Classifier model;
  Matrix x;
  std::vector<std::size_t> y;
  std::vector<std::size_t> batch;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture f;
    const std::vector<std::size_t> dims{80, 128, 128, 10};
    f.model = init_classifier(dims, 1);
    Rng rng(2);
    f.x = Matrix(512, 80);
    for (auto& v : f.x.data) v = rng.normal();
    for (std::size_t i = 0; i < f.x.rows; ++i) f.y.push_back(rng.below(10));
    f.batch.resize(32);
    std::iota(f.batch.begin(), f.batch.end(), std::size_t{0});
    return f;
  }();
  return f;
}

const std::vector<AudioClip>& clips() {
  static const std::vector<AudioClip> c = [] {
    CorpusSpec spec;
    spec.num_speakers = 4;
    spec.utterances_per_speaker = 8;
    spec.seed = 3;
    std::vector<AudioClip> out;
    for (const auto& s : generate_corpus(spec).samples) out.push_back(*s.clip);
    return out;
  }();
  return c;
}

template <auto Kernel>
void BM_Gradients(benchmark::State& state) {
  const auto& f = fixture();
  kernels::BatchScratch scratch;
  Gradients g = Gradients::zeros_like(f.model);
  for (auto _ : state) {
    g.set_zero();
    benchmark::DoNotOptimize(Kernel(f.model, f.x, f.y, f.batch, scratch, g));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.batch.size()));
}
BENCHMARK(BM_Gradients<kernels::serial::accumulate_gradients>)->Name("gradients/serial");
BENCHMARK(BM_Gradients<kernels::omp::accumulate_gradients>)->Name("gradients/omp");

template <auto Kernel>
void BM_Evaluate(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.model, f.x, f.y));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.x.rows));
}
BENCHMARK(BM_Evaluate<kernels::serial::evaluate>)->Name("evaluate/serial");
BENCHMARK(BM_Evaluate<kernels::omp::evaluate>)->Name("evaluate/omp");

template <auto Kernel>
void BM_Features(benchmark::State& state) {
  const FeatureExtractor fx{FeatureConfig{}};
  std::vector<const AudioClip*> ptrs;
  for (const auto& c : clips()) ptrs.push_back(&c);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(ptrs, fx));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ptrs.size()));
}
BENCHMARK(BM_Features<kernels::serial::extract_features>)->Name("features/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Features<kernels::omp::extract_features>)->Name("features/omp")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
