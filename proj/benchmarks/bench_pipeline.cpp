// Microbenchmarks for the hot path of the evaluation sweep: matrix assembly,
// per-level fitting, row classification and one full train+score plan.
// Corpora are synthetic (planted preferences) at MovieLens-1M-like scale.

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "genre_bayes/eval.hpp"
#include "genre_bayes/genre_model.hpp"
#include "genre_bayes/movielens.hpp"
#include "support.hpp"

using namespace genre_bayes;

namespace {

struct Corpus {
  test_support::SyntheticDataset dataset;
  RatingMatrices matrices;
  std::vector<SplitPlan> half_split;

  Corpus(uint32_t users, uint32_t movies, uint32_t genres, uint32_t raters,
         uint64_t seed)
      : dataset(test_support::make_synthetic(users, movies, genres, raters,
                                             seed)),
        matrices(build_matrices(dataset.events, dataset.labels)) {
    const std::vector<double> half = {0.5};
    half_split = make_splits(movies, half, 1, seed);
  }
};

// medium: ~120k events; large: ml-1m scale, ~1M events
const Corpus& medium_corpus() {
  static const Corpus corpus(2000, 1200, 12, 100, 0xBE7Cull);
  return corpus;
}

const Corpus& large_corpus() {
  static const Corpus corpus(6040, 3883, 18, 258, 0xBE7C2ull);
  return corpus;
}

const Corpus& pick(int64_t which) {
  return which == 0 ? medium_corpus() : large_corpus();
}

void BM_BuildMatrices(benchmark::State& state) {
  const Corpus& corpus = pick(state.range(0));
  for (auto _ : state) {
    RatingMatrices matrices =
        build_matrices(corpus.dataset.events, corpus.dataset.labels);
    benchmark::DoNotOptimize(matrices.entry_count());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) *
                          int64_t(corpus.dataset.events.size()));
}
BENCHMARK(BM_BuildMatrices)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TrainAllLevels(benchmark::State& state) {
  const Corpus& corpus = pick(state.range(0));
  const SplitPlan& plan = corpus.half_split[0];
  for (auto _ : state) {
    GenrePredictor predictor =
        train(corpus.matrices, corpus.dataset.labels, plan.train_movies);
    benchmark::DoNotOptimize(predictor.user_count());
  }
}
BENCHMARK(BM_TrainAllLevels)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ClassifyRows(benchmark::State& state) {
  const Corpus& corpus = pick(state.range(0));
  const SplitPlan& plan = corpus.half_split[0];
  const GenrePredictor predictor =
      train(corpus.matrices, corpus.dataset.labels, plan.train_movies);
  std::vector<double> scratch(predictor.genres().size());
  size_t rows = 0;
  for (auto _ : state) {
    uint32_t winner = 0;
    for (uint32_t movie : plan.test_movies) {
      winner ^= predictor.classify(4, corpus.matrices.level(4).row(movie),
                                   scratch);
      ++rows;
    }
    benchmark::DoNotOptimize(winner);
  }
  state.SetItemsProcessed(int64_t(rows));
}
BENCHMARK(BM_ClassifyRows)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// one unit of the sweep: train on the split, score all levels, baseline
void BM_EvalPlan(benchmark::State& state) {
  const Corpus& corpus = pick(state.range(0));
  const SplitPlan& plan = corpus.half_split[0];
  for (auto _ : state) {
    const GenrePredictor predictor =
        train(corpus.matrices, corpus.dataset.labels, plan.train_movies);
    double total = 0.0;
    for (int level = 1; level <= kRatingLevels; ++level) {
      total += score_split(predictor, corpus.matrices, corpus.dataset.labels,
                           plan.test_movies, level);
    }
    total += baseline_prior(corpus.dataset.labels, plan.train_movies,
                            plan.test_movies);
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_EvalPlan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
