#include "genre_bayes/genre_model.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace genre_bayes {

bool GenrePredictor::has_level(int rating_level) const {
  return rating_level >= 1 && rating_level <= kRatingLevels &&
         fitted_[rating_level - 1];
}

const NBModel& GenrePredictor::model(int rating_level) const {
  if (rating_level < 1 || rating_level > kRatingLevels) {
    throw UsageError("rating level " + std::to_string(rating_level) +
                     " outside 1..5");
  }
  if (!fitted_[rating_level - 1]) {
    throw UsageError("rating level " + std::to_string(rating_level) +
                     " was not trained");
  }
  return models_[rating_level - 1];
}

uint32_t GenrePredictor::classify(int rating_level,
                                  std::span<const uint32_t> user_row,
                                  std::span<double> scratch) const {
  const NBModel& level_model = model(rating_level);
  if (scratch.size() == level_model.class_count()) {
    unnormalized_log_scores(level_model, user_row, scratch);
    return argmax_class(scratch);
  }
  return genre_bayes::classify(level_model, user_row);
}

GenrePredictor train(const RatingMatrices& matrices, const GenreLabels& labels,
                     std::span<const uint32_t> training_movies,
                     LabelWeighting weighting,
                     std::span<const int> rating_levels) {
  if (training_movies.empty()) {
    throw ConfigError("train: empty training movie set");
  }
  if (rating_levels.empty()) {
    throw ConfigError("train: no rating levels requested");
  }
  const uint32_t movie_count = labels.movie_count();
  for (uint32_t movie : training_movies) {
    if (movie >= movie_count) {
      throw UsageError("train: movie index " + std::to_string(movie) +
                       " out of range");
    }
  }

  GenrePredictor predictor;
  predictor.genres_ = labels.genres();
  predictor.user_count_ = matrices.user_count();
  const uint32_t genre_count = predictor.genres_.size();

  // Genre prior over all training movies, fractional 1/N weights. Movies
  // with an empty row at some level still contribute here; the prior does
  // not depend on the level, so it is estimated once and shared.
  predictor.prior_.assign(genre_count, 0.0);
  for (uint32_t movie : training_movies) {
    const double weight = labels.label_weight(movie);
    for (uint32_t genre : labels.genre_ids(movie)) {
      predictor.prior_[genre] += weight;
    }
  }
  for (double& p : predictor.prior_) p /= double(training_movies.size());

  // Labels are identical across levels; build the flat buffer once.
  std::vector<WeightedLabel> label_buf;
  std::vector<size_t> label_offsets;
  label_offsets.reserve(training_movies.size() + 1);
  label_offsets.push_back(0);
  for (uint32_t movie : training_movies) {
    const double weight = labels.label_weight(movie);
    for (uint32_t genre : labels.genre_ids(movie)) {
      label_buf.push_back({genre, weight});
    }
    label_offsets.push_back(label_buf.size());
  }

  const Vocabulary users{matrices.user_count()};
  std::vector<TokenEntry> token_buf;
  std::vector<ExampleView> examples(training_movies.size());
  for (int level : rating_levels) {
    const SparseBinaryMatrix& matrix = matrices.level(level);  // validates
    size_t total = 0;
    for (uint32_t movie : training_movies) total += matrix.row(movie).size();
    token_buf.clear();
    token_buf.reserve(total);  // no reallocation: views stay valid
    for (size_t i = 0; i < training_movies.size(); ++i) {
      const std::span<const uint32_t> row = matrix.row(training_movies[i]);
      const size_t begin = token_buf.size();
      for (uint32_t user : row) token_buf.push_back({user, 1});
      examples[i] = {
          {token_buf.data() + begin, row.size()},
          {label_buf.data() + label_offsets[i],
           label_offsets[i + 1] - label_offsets[i]},
      };
    }
    FitOptions options;
    options.weighting = weighting;
    options.fixed_prior = predictor.prior_;
    predictor.models_[level - 1] =
        fit(std::span<const ExampleView>(examples), users, predictor.genres_,
            options);
    predictor.fitted_[level - 1] = true;
  }
  return predictor;
}

Prediction predict(const GenrePredictor& predictor, int rating_level,
                   std::span<const uint32_t> user_row) {
  const NBModel& model = predictor.model(rating_level);
  Prediction out;
  out.log_posterior = log_posterior(model, user_row);
  out.genre = genre_bayes::classify(model, user_row);
  return out;
}

PredictorTables export_tables(const GenrePredictor& predictor, int rating_level,
                              std::span<const uint32_t> movies,
                              const RatingMatrices& matrices) {
  const NBModel& model = predictor.model(rating_level);
  const uint32_t user_count = model.vocab_size();
  const uint32_t genre_count = model.class_count();

  PredictorTables tables;
  tables.user_count = user_count;
  tables.genre_count = genre_count;

  tables.user_given_genre.resize(size_t(genre_count) * user_count);
  for (uint32_t user = 0; user < user_count; ++user) {
    const std::span<const double> row = model.token_row(user);
    for (uint32_t genre = 0; genre < genre_count; ++genre) {
      tables.user_given_genre[size_t(genre) * user_count + user] =
          std::exp(row[genre]);
    }
  }

  const SparseBinaryMatrix& matrix = matrices.level(rating_level);
  tables.movies.assign(movies.begin(), movies.end());
  tables.movie_log_scores.resize(size_t(movies.size()) * genre_count);
  for (size_t i = 0; i < movies.size(); ++i) {
    std::span<double> scores{
        tables.movie_log_scores.data() + i * genre_count, genre_count};
    unnormalized_log_scores(model, matrix.row(movies[i]), scores);
  }
  return tables;
}

}  // namespace genre_bayes
