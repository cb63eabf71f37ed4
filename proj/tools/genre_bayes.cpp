// Command-line front end: dataset statistics, the prediction-rate experiment,
// single-movie prediction, and figure-table export. Every command writes
// deterministic CSV; plotting is left to external tools.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "genre_bayes/csv.hpp"
#include "genre_bayes/eval.hpp"
#include "genre_bayes/genre_model.hpp"
#include "genre_bayes/movielens.hpp"

namespace fs = std::filesystem;
using namespace genre_bayes;

namespace {

struct CommonConfig {
  std::string data_dir;
  std::string out_dir = "./out";
  uint64_t seed = 42;
  LabelWeighting weighting = LabelWeighting::fractional;
};

struct Dataset {
  std::vector<RatingEvent> events;
  GenreLabels labels;
};

fs::path require_file(const fs::path& dir, const char* name) {
  const fs::path path = dir / name;
  if (!fs::exists(path)) {
    throw ConfigError("missing file: " + path.string());
  }
  return path;
}

Dataset load_dataset(const std::string& data_dir) {
  const fs::path dir(data_dir);
  const fs::path ratings = require_file(dir, "ratings.dat");
  const fs::path movies = require_file(dir, "movies.dat");
  Dataset dataset;
  dataset.labels = parse_movies(movies);
  dataset.events = parse_ratings(ratings);
  return dataset;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("failed writing " + path.string());
}

void add_common_options(CLI::App* cmd, CommonConfig& config) {
  cmd->add_option("--data-dir", config.data_dir,
                  "directory holding ratings.dat and movies.dat")
      ->envname("GENRE_BAYES_DATA_DIR")
      ->required();
  cmd->add_option("--out", config.out_dir, "output directory for CSV files")
      ->capture_default_str();
  cmd->add_option("--seed", config.seed, "master seed")
      ->capture_default_str();
  cmd->add_option("--label-weighting", config.weighting,
                  "how multi-genre labels weight the token counts")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, LabelWeighting>{
              {"fractional", LabelWeighting::fractional},
              {"full", LabelWeighting::full}},
          CLI::ignore_case))
      ->default_str("fractional");
}

// -------------------------------------------------------------------------
// stats

int cmd_stats(const CommonConfig& config) {
  const Dataset dataset = load_dataset(config.data_dir);
  const CorpusStats stats = corpus_stats(dataset.events, dataset.labels);

  std::ostringstream histogram;
  histogram << "rating,count\n";
  for (int rating = 1; rating <= kRatingLevels; ++rating) {
    histogram << rating << ',' << stats.rating_histogram[rating - 1] << '\n';
  }
  std::ostringstream multiplicity;
  multiplicity << "num_genres,fraction\n";
  for (size_t n = 0; n < stats.genre_multiplicity.size(); ++n) {
    multiplicity << (n + 1) << ',' << csv_rate(stats.genre_multiplicity[n])
                 << '\n';
  }

  const fs::path out(config.out_dir);
  write_file(out / "rating_histogram.csv", histogram.str());
  write_file(out / "genre_multiplicity.csv", multiplicity.str());

  std::cout << "users: " << stats.user_count << "\n"
            << "movies: " << stats.movie_count << "\n"
            << "ratings: " << stats.rating_count << "\n"
            << "genres: " << dataset.labels.genres().size() << "\n"
            << "wrote " << (out / "rating_histogram.csv").string() << "\n"
            << "wrote " << (out / "genre_multiplicity.csv").string() << "\n";
  return 0;
}

// -------------------------------------------------------------------------
// evaluate

struct LevelSelection {
  std::vector<int> levels = {1, 2, 3, 4, 5};
  bool best_only = false;  // report the best level per fraction on stdout
};

LevelSelection parse_levels(const std::vector<std::string>& tokens) {
  LevelSelection selection;
  if (tokens.empty()) return selection;
  if (tokens.size() == 1 && tokens[0] == "best") {
    selection.best_only = true;
    return selection;
  }
  selection.levels.clear();
  for (const std::string& token : tokens) {
    int level = 0;
    try {
      level = std::stoi(token);
    } catch (const std::exception&) {
      throw ConfigError("--levels expects values 1..5 or 'best', got '" +
                        token + "'");
    }
    if (level < 1 || level > kRatingLevels) {
      throw ConfigError("--levels expects values 1..5 or 'best', got '" +
                        token + "'");
    }
    selection.levels.push_back(level);
  }
  return selection;
}

int cmd_evaluate(const CommonConfig& config, const std::vector<double>& fractions,
                 uint32_t repetitions, const std::vector<std::string>& levels,
                 unsigned threads) {
  const Dataset dataset = load_dataset(config.data_dir);
  const RatingMatrices matrices = build_matrices(dataset.events, dataset.labels);
  if (matrices.dropped_unlabeled > 0) {
    std::cerr << "note: dropped " << matrices.dropped_unlabeled
              << " events for movies missing from movies.dat\n";
  }

  const LevelSelection selection = parse_levels(levels);
  EvalConfig eval_config;
  if (!fractions.empty()) eval_config.fractions = fractions;
  eval_config.repetitions = repetitions;
  eval_config.master_seed = config.seed;
  eval_config.rating_levels = selection.levels;
  eval_config.weighting = config.weighting;
  eval_config.threads = threads;

  const EvalReport report = run_experiment(matrices, dataset.labels, eval_config);

  std::ostringstream rates;
  write_rates_csv(report, rates);
  std::ostringstream baseline;
  write_baseline_csv(report, baseline);
  const fs::path out(config.out_dir);
  write_file(out / "prediction_rates.csv", rates.str());
  write_file(out / "baseline_rates.csv", baseline.str());

  std::cout << "fraction,level,mean_rate,std_rate\n";
  const size_t level_count = report.config.rating_levels.size();
  for (size_t fi = 0; fi < report.config.fractions.size(); ++fi) {
    if (selection.best_only) {
      const EvalReport::RateRow* best = &report.rates[fi * level_count];
      for (size_t li = 1; li < level_count; ++li) {
        const EvalReport::RateRow& row = report.rates[fi * level_count + li];
        if (row.mean_rate > best->mean_rate) best = &row;
      }
      std::cout << csv_general(best->fraction) << ",best=" << best->level
                << ',' << csv_rate(best->mean_rate) << ','
                << csv_rate(best->std_rate) << '\n';
    } else {
      for (size_t li = 0; li < level_count; ++li) {
        const EvalReport::RateRow& row = report.rates[fi * level_count + li];
        std::cout << csv_general(row.fraction) << ',' << row.level << ','
                  << csv_rate(row.mean_rate) << ',' << csv_rate(row.std_rate)
                  << '\n';
      }
    }
  }
  std::cout << "fraction,baseline_rate\n";
  for (const EvalReport::BaselineRow& row : report.baselines) {
    std::cout << csv_general(row.fraction) << ',' << csv_rate(row.baseline_rate)
              << '\n';
  }
  std::cout << "wrote " << (out / "prediction_rates.csv").string() << "\n"
            << "wrote " << (out / "baseline_rates.csv").string() << "\n";
  return 0;
}

// -------------------------------------------------------------------------
// predict

// One seeded split; the queried movie is forced out of the training side
// (swapped with the lowest-index test movie) so it is always held out.
SplitPlan single_split_excluding(uint32_t movie_count, double fraction,
                                 uint64_t seed, uint32_t movie) {
  SplitPlan plan =
      std::move(make_splits(movie_count, std::array{fraction}, 1, seed)[0]);
  auto in_train = std::find(plan.train_movies.begin(), plan.train_movies.end(),
                            movie);
  if (in_train != plan.train_movies.end()) {
    const uint32_t swapped = plan.test_movies.front();
    *in_train = swapped;
    plan.test_movies.front() = movie;
    std::sort(plan.train_movies.begin(), plan.train_movies.end());
    std::sort(plan.test_movies.begin(), plan.test_movies.end());
  }
  return plan;
}

int cmd_predict(const CommonConfig& config, uint32_t raw_movie_id,
                int rating_level, double fraction) {
  const Dataset dataset = load_dataset(config.data_dir);
  const std::optional<uint32_t> movie = dataset.labels.index_of(raw_movie_id);
  if (!movie) {
    throw ConfigError("unknown movie id " + std::to_string(raw_movie_id));
  }
  const RatingMatrices matrices = build_matrices(dataset.events, dataset.labels);

  const SplitPlan plan = single_split_excluding(
      dataset.labels.movie_count(), fraction, config.seed, *movie);
  const std::array<int, 1> levels = {rating_level};
  const GenrePredictor predictor = train(matrices, dataset.labels,
                                         plan.train_movies, config.weighting,
                                         levels);

  const std::span<const uint32_t> row =
      matrices.level(rating_level).row(*movie);
  const Prediction prediction = predict(predictor, rating_level, row);

  const ClassSet& genres = dataset.labels.genres();
  std::cout << "# movie " << raw_movie_id << " \""
            << dataset.labels.title(*movie) << "\" | level " << rating_level
            << " | raters at level: " << row.size() << " | trained on "
            << plan.train_movies.size() << "/" << dataset.labels.movie_count()
            << " movies | seed " << config.seed << "\n";
  std::cout << "# true genres: ";
  bool first = true;
  for (uint32_t g : dataset.labels.genre_ids(*movie)) {
    std::cout << (first ? "" : "|") << genres.name(g);
    first = false;
  }
  std::cout << "\n";
  const std::span<const uint32_t> zero_prior =
      predictor.model(rating_level).zero_prior_classes();
  if (!zero_prior.empty()) {
    std::cout << "# genres absent from this training split: ";
    for (size_t i = 0; i < zero_prior.size(); ++i) {
      std::cout << (i ? "|" : "") << genres.name(zero_prior[i]);
    }
    std::cout << "\n";
  }

  std::vector<uint32_t> order(genres.size());
  for (uint32_t g = 0; g < genres.size(); ++g) order[g] = g;
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return prediction.log_posterior[a] > prediction.log_posterior[b];
  });

  std::cout << "genre,posterior,log_posterior\n";
  for (uint32_t g : order) {
    const double log_post = prediction.log_posterior[g];
    std::cout << genres.name(g) << ',' << csv_general(std::exp(log_post)) << ','
              << csv_general(log_post) << '\n';
  }
  return 0;
}

// -------------------------------------------------------------------------
// export-tables

int cmd_export_tables(const CommonConfig& config, int rating_level,
                      double fraction) {
  const Dataset dataset = load_dataset(config.data_dir);
  const RatingMatrices matrices = build_matrices(dataset.events, dataset.labels);

  const std::vector<SplitPlan> plans = make_splits(
      dataset.labels.movie_count(), std::array{fraction}, 1, config.seed);
  const std::array<int, 1> levels = {rating_level};
  const GenrePredictor predictor =
      train(matrices, dataset.labels, plans[0].train_movies, config.weighting,
            levels);

  std::vector<uint32_t> all_movies(dataset.labels.movie_count());
  for (uint32_t m = 0; m < all_movies.size(); ++m) all_movies[m] = m;
  const PredictorTables tables =
      export_tables(predictor, rating_level, all_movies, matrices);

  const ClassSet& genres = dataset.labels.genres();
  std::ostringstream users_csv;
  users_csv << "genre";
  for (uint32_t u = 0; u < tables.user_count; ++u) {
    users_csv << ",u" << matrices.user_ids[u];
  }
  users_csv << '\n';
  for (uint32_t g = 0; g < tables.genre_count; ++g) {
    users_csv << genres.name(g);
    const double* row = tables.user_given_genre.data() +
                        size_t(g) * tables.user_count;
    for (uint32_t u = 0; u < tables.user_count; ++u) {
      users_csv << ',' << csv_general(row[u]);
    }
    users_csv << '\n';
  }

  std::ostringstream movies_csv;
  movies_csv << "movie_id";
  for (uint32_t g = 0; g < tables.genre_count; ++g) {
    movies_csv << ',' << genres.name(g);
  }
  movies_csv << '\n';
  for (size_t i = 0; i < tables.movies.size(); ++i) {
    movies_csv << dataset.labels.raw_id(tables.movies[i]);
    const double* row = tables.movie_log_scores.data() +
                        i * tables.genre_count;
    for (uint32_t g = 0; g < tables.genre_count; ++g) {
      movies_csv << ',' << csv_general(row[g]);
    }
    movies_csv << '\n';
  }

  const std::string suffix = "_level" + std::to_string(rating_level) + ".csv";
  const fs::path out(config.out_dir);
  write_file(out / ("user_given_genre" + suffix), users_csv.str());
  write_file(out / ("movie_log_scores" + suffix), movies_csv.str());
  std::cout << "wrote " << (out / ("user_given_genre" + suffix)).string()
            << "\n"
            << "wrote " << (out / ("movie_log_scores" + suffix)).string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bag-of-users movie genre prediction over MovieLens ratings"};
  app.require_subcommand(1);

  CommonConfig config;

  CLI::App* stats = app.add_subcommand(
      "stats", "rating histogram and genre-multiplicity CSVs");
  add_common_options(stats, config);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate",
      "repeated-split prediction-rate experiment; writes the figure CSVs");
  add_common_options(evaluate, config);
  std::vector<double> fractions;
  uint32_t repetitions = 50;
  std::vector<std::string> level_tokens;
  unsigned threads = 0;
  evaluate->add_option("--fractions", fractions,
                       "training fractions in (0,1); default 0.05..0.95 step 0.05")
      ->delimiter(',');
  evaluate->add_option("--repetitions", repetitions,
                       "independent repetitions per fraction")
      ->capture_default_str();
  evaluate->add_option("--levels", level_tokens,
                       "rating levels 1..5, or 'best' to report the top level")
      ->delimiter(',');
  evaluate->add_option("--threads", threads,
                       "worker threads (0 = hardware concurrency)")
      ->capture_default_str();

  CLI::App* predict = app.add_subcommand(
      "predict", "per-genre posterior for one held-out movie");
  add_common_options(predict, config);
  uint32_t movie_id = 0;
  int predict_level = 0;
  double predict_fraction = 0.5;
  predict->add_option("--movie-id", movie_id, "raw MovieLens movie id")
      ->required();
  predict->add_option("--level", predict_level, "rating level 1..5")
      ->required()
      ->check(CLI::Range(1, kRatingLevels));
  predict->add_option("--fraction", predict_fraction,
                      "training fraction for the seeded split")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  CLI::App* export_tables = app.add_subcommand(
      "export-tables", "P(u|g) and per-movie log-score matrices as CSV");
  add_common_options(export_tables, config);
  int export_level = 0;
  double export_fraction = 0.5;
  export_tables->add_option("--level", export_level, "rating level 1..5")
      ->required()
      ->check(CLI::Range(1, kRatingLevels));
  export_tables->add_option("--fraction", export_fraction,
                            "training fraction for the seeded split")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats->parsed()) return cmd_stats(config);
    if (evaluate->parsed()) {
      return cmd_evaluate(config, fractions, repetitions, level_tokens,
                          threads);
    }
    if (predict->parsed()) {
      return cmd_predict(config, movie_id, predict_level, predict_fraction);
    }
    if (export_tables->parsed()) {
      return cmd_export_tables(config, export_level, export_fraction);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
