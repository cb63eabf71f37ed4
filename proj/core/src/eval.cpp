#include "genre_bayes/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "genre_bayes/csv.hpp"

namespace genre_bayes {

namespace detail {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

uint64_t split_seed(uint64_t master_seed, double fraction,
                    uint32_t repetition) {
  const uint64_t quantized = uint64_t(std::llround(fraction * 1e6));
  uint64_t seed = splitmix64(master_seed);
  seed = splitmix64(seed ^ quantized);
  seed = splitmix64(seed ^ repetition);
  return seed;
}

}  // namespace detail

namespace {

// Unbiased bounded draw by rejection; fully specified, unlike
// std::uniform_int_distribution.
uint64_t bounded(std::mt19937_64& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % n;
}

// Fisher-Yates with explicit draws so the permutation depends only on the
// generator stream, not on a standard library's shuffle implementation.
void shuffle_movies(std::vector<uint32_t>& movies, std::mt19937_64& rng) {
  for (size_t i = movies.size(); i > 1; --i) {
    const size_t j = size_t(bounded(rng, i));
    std::swap(movies[i - 1], movies[j]);
  }
}

uint32_t round_train_size(double fraction, uint32_t movie_count) {
  return uint32_t(std::llround(fraction * double(movie_count)));
}

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / double(values.size());
}

double sample_std(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  double sum_sq = 0.0;
  for (double v : values) sum_sq += (v - mean) * (v - mean);
  return std::sqrt(sum_sq / double(values.size() - 1));
}

}  // namespace

std::vector<double> default_fractions() {
  std::vector<double> fractions(19);
  for (int i = 1; i <= 19; ++i) fractions[i - 1] = double(i) * 0.05;
  return fractions;
}

std::vector<SplitPlan> make_splits(uint32_t movie_count,
                                   std::span<const double> fractions,
                                   uint32_t repetitions, uint64_t master_seed) {
  if (movie_count == 0) throw ConfigError("make_splits: no movies");
  if (repetitions == 0) throw ConfigError("make_splits: repetitions must be >= 1");
  if (fractions.empty()) throw ConfigError("make_splits: no fractions");
  for (double fraction : fractions) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
      throw ConfigError("make_splits: training fraction " +
                        csv_general(fraction) + " outside (0,1)");
    }
    const uint32_t train_size = round_train_size(fraction, movie_count);
    if (train_size == 0 || train_size >= movie_count) {
      throw ConfigError("make_splits: fraction " + csv_general(fraction) +
                        " yields an empty train or test set");
    }
  }

  std::vector<SplitPlan> plans;
  plans.reserve(size_t(fractions.size()) * repetitions);
  std::vector<uint32_t> perm(movie_count);
  for (double fraction : fractions) {
    const uint32_t train_size = round_train_size(fraction, movie_count);
    for (uint32_t rep = 0; rep < repetitions; ++rep) {
      std::iota(perm.begin(), perm.end(), 0u);
      std::mt19937_64 rng(detail::split_seed(master_seed, fraction, rep));
      shuffle_movies(perm, rng);

      SplitPlan plan;
      plan.fraction = fraction;
      plan.repetition = rep;
      plan.master_seed = master_seed;
      plan.train_movies.assign(perm.begin(), perm.begin() + train_size);
      plan.test_movies.assign(perm.begin() + train_size, perm.end());
      std::sort(plan.train_movies.begin(), plan.train_movies.end());
      std::sort(plan.test_movies.begin(), plan.test_movies.end());
      plans.push_back(std::move(plan));
    }
  }
  return plans;
}

double score_split(const GenrePredictor& predictor,
                   const RatingMatrices& matrices, const GenreLabels& labels,
                   std::span<const uint32_t> test_movies, int rating_level) {
  if (test_movies.empty()) throw ConfigError("score_split: empty test set");
  const SparseBinaryMatrix& matrix = matrices.level(rating_level);
  std::vector<double> scratch(predictor.genres().size());
  size_t hits = 0;
  for (uint32_t movie : test_movies) {
    const uint32_t genre =
        predictor.classify(rating_level, matrix.row(movie), scratch);
    hits += labels.movie_has_genre(movie, genre) ? 1 : 0;
  }
  return double(hits) / double(test_movies.size());
}

double baseline_prior(const GenreLabels& labels,
                      std::span<const uint32_t> train_movies,
                      std::span<const uint32_t> test_movies) {
  if (train_movies.empty()) throw ConfigError("baseline_prior: empty train set");
  if (test_movies.empty()) throw ConfigError("baseline_prior: empty test set");

  std::vector<double> prior(labels.genres().size(), 0.0);
  for (uint32_t movie : train_movies) {
    const double weight = labels.label_weight(movie);
    for (uint32_t genre : labels.genre_ids(movie)) prior[genre] += weight;
  }
  uint32_t best = 0;
  for (uint32_t g = 1; g < prior.size(); ++g) {
    if (prior[g] > prior[best]) best = g;  // ties keep the lowest genre id
  }
  size_t hits = 0;
  for (uint32_t movie : test_movies) {
    hits += labels.movie_has_genre(movie, best) ? 1 : 0;
  }
  return double(hits) / double(test_movies.size());
}

EvalReport run_experiment(const RatingMatrices& matrices,
                          const GenreLabels& labels, const EvalConfig& config) {
  EvalConfig normalized = config;
  if (normalized.rating_levels.empty()) {
    throw ConfigError("run_experiment: no rating levels");
  }
  std::sort(normalized.rating_levels.begin(), normalized.rating_levels.end());
  normalized.rating_levels.erase(std::unique(normalized.rating_levels.begin(),
                                             normalized.rating_levels.end()),
                                 normalized.rating_levels.end());
  for (int level : normalized.rating_levels) {
    if (level < 1 || level > kRatingLevels) {
      throw ConfigError("run_experiment: rating level " +
                        std::to_string(level) + " outside 1..5");
    }
  }

  const std::vector<SplitPlan> plans =
      make_splits(labels.movie_count(), normalized.fractions,
                  normalized.repetitions, normalized.master_seed);
  const size_t level_count = normalized.rating_levels.size();

  std::vector<double> rates(plans.size() * level_count, 0.0);
  std::vector<double> baselines(plans.size(), 0.0);

  unsigned threads = normalized.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<size_t>(threads, plans.size()));

  std::atomic<size_t> next_plan{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const size_t i = next_plan.fetch_add(1, std::memory_order_relaxed);
        if (i >= plans.size()) return;
        const SplitPlan& plan = plans[i];
        const GenrePredictor predictor =
            train(matrices, labels, plan.train_movies, normalized.weighting,
                  normalized.rating_levels);
        for (size_t li = 0; li < level_count; ++li) {
          rates[i * level_count + li] =
              score_split(predictor, matrices, labels, plan.test_movies,
                          normalized.rating_levels[li]);
        }
        baselines[i] = baseline_prior(labels, plan.train_movies,
                                      plan.test_movies);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      next_plan.store(plans.size(), std::memory_order_relaxed);  // drain
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (unsigned t = 0; t + 1 < threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& thread : pool) thread.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Aggregation order is fixed by plan index; the parallel schedule cannot
  // change the report.
  EvalReport report;
  report.config = normalized;
  const uint32_t reps = normalized.repetitions;
  std::vector<double> rep_rates(reps);
  for (size_t fi = 0; fi < normalized.fractions.size(); ++fi) {
    for (size_t li = 0; li < level_count; ++li) {
      for (uint32_t rep = 0; rep < reps; ++rep) {
        rep_rates[rep] = rates[(fi * reps + rep) * level_count + li];
      }
      EvalReport::RateRow row;
      row.fraction = normalized.fractions[fi];
      row.level = normalized.rating_levels[li];
      row.mean_rate = mean_of(rep_rates);
      row.std_rate = sample_std(rep_rates, row.mean_rate);
      report.rates.push_back(row);
    }
    for (uint32_t rep = 0; rep < reps; ++rep) {
      rep_rates[rep] = baselines[fi * reps + rep];
    }
    report.baselines.push_back(
        {normalized.fractions[fi], mean_of(rep_rates)});
  }
  return report;
}

void write_rates_csv(const EvalReport& report, std::ostream& out) {
  out << "fraction,level,mean_rate,std_rate\n";
  for (const EvalReport::RateRow& row : report.rates) {
    out << csv_general(row.fraction) << ',' << row.level << ','
        << csv_rate(row.mean_rate) << ',' << csv_rate(row.std_rate) << '\n';
  }
}

void write_baseline_csv(const EvalReport& report, std::ostream& out) {
  out << "fraction,baseline_rate\n";
  for (const EvalReport::BaselineRow& row : report.baselines) {
    out << csv_general(row.fraction) << ',' << csv_rate(row.baseline_rate)
        << '\n';
  }
}

}  // namespace genre_bayes
