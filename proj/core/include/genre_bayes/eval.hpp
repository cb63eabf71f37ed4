#pragma once

// The prediction-rate experiment: repeated random movie splits across a grid
// of training fractions, per-rating-level prediction rates with mean/std over
// repetitions, and the prior-only baseline. A prediction is successful when
// the argmax genre is one of the movie's true genres.

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "genre_bayes/genre_model.hpp"
#include "genre_bayes/movielens.hpp"

namespace genre_bayes {

// Seeded train/test partition of the dense movie index space.
// train size = round(fraction * movie_count); both sides sorted ascending.
struct SplitPlan {
  double fraction = 0.0;
  uint32_t repetition = 0;
  uint64_t master_seed = 0;
  std::vector<uint32_t> train_movies;
  std::vector<uint32_t> test_movies;
};

// One plan per (fraction, repetition), fraction-major. Sub-seeds come from a
// fixed splitmix64 mix of (master seed, quantized fraction, repetition), so
// plans for one fraction are unaffected by which other fractions are present.
// Identical arguments yield identical plans. Throws ConfigError when a
// fraction is outside (0,1) or yields an empty train or test set.
std::vector<SplitPlan> make_splits(uint32_t movie_count,
                                   std::span<const double> fractions,
                                   uint32_t repetitions, uint64_t master_seed);

// Fraction of test movies whose predicted genre at this level is one of
// their true genres.
double score_split(const GenrePredictor& predictor,
                   const RatingMatrices& matrices, const GenreLabels& labels,
                   std::span<const uint32_t> test_movies, int rating_level);

// Predict the argmax genre of the prior (estimated on the training movies)
// for every test movie; same any-true-genre success criterion.
double baseline_prior(const GenreLabels& labels,
                      std::span<const uint32_t> train_movies,
                      std::span<const uint32_t> test_movies);

// The training fractions of the reference protocol: 0.05 .. 0.95, step 0.05.
std::vector<double> default_fractions();

struct EvalConfig {
  std::vector<double> fractions = default_fractions();
  uint32_t repetitions = 50;
  uint64_t master_seed = 42;
  std::vector<int> rating_levels = {1, 2, 3, 4, 5};
  LabelWeighting weighting = LabelWeighting::fractional;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct EvalReport {
  struct RateRow {
    double fraction = 0.0;
    int level = 0;
    double mean_rate = 0.0;
    double std_rate = 0.0;  // sample (n-1) standard deviation; 0 when n = 1
  };
  struct BaselineRow {
    double fraction = 0.0;
    double baseline_rate = 0.0;  // mean over repetitions
  };

  EvalConfig config;  // echo of the run configuration
  std::vector<RateRow> rates;          // fraction-major, levels inner
  std::vector<BaselineRow> baselines;  // one per fraction
};

// Train and score every plan. Plans are independent work items fanned out
// over `threads` workers; per-plan results land in a slot indexed by plan,
// and aggregation walks slots in plan order, so the report is byte-identical
// to a sequential run regardless of schedule.
EvalReport run_experiment(const RatingMatrices& matrices,
                          const GenreLabels& labels, const EvalConfig& config);

// `fraction,level,mean_rate,std_rate` rows behind the prediction-rate figure.
void write_rates_csv(const EvalReport& report, std::ostream& out);
// `fraction,baseline_rate` rows.
void write_baseline_csv(const EvalReport& report, std::ostream& out);

namespace detail {
// splitmix64 finalizer; the documented mixing primitive behind sub-seeds.
uint64_t splitmix64(uint64_t x);
// sub-seed = mix(master, llround(fraction * 1e6), repetition). Quantizing the
// fraction makes the seed immune to representation noise (3 * 0.05 vs 0.15).
uint64_t split_seed(uint64_t master_seed, double fraction, uint32_t repetition);
}  // namespace detail

}  // namespace genre_bayes
