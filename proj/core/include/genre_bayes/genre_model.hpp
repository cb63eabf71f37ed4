#pragma once

// Bag-of-users genre predictor: one Naive Bayes model per rating level with
// vocabulary = users and classes = genres. A movie is the set of users who
// rated it at level k; every count is 1 (categorical event model).

#include <array>
#include <span>
#include <vector>

#include "genre_bayes/movielens.hpp"
#include "genre_bayes/nb.hpp"
#include "genre_bayes/types.hpp"

namespace genre_bayes {

inline constexpr std::array<int, kRatingLevels> kAllRatingLevelsArray = {
    1, 2, 3, 4, 5};
inline constexpr std::span<const int> kAllRatingLevels{kAllRatingLevelsArray};

class GenrePredictor {
 public:
  GenrePredictor() = default;

  const ClassSet& genres() const { return genres_; }
  uint32_t user_count() const { return user_count_; }

  bool has_level(int rating_level) const;
  // The fitted model for one rating level (1..5). UsageError when the level
  // was not part of training.
  const NBModel& model(int rating_level) const;

  // The shared genre prior estimated from the training movies (linear
  // scale; identical across levels).
  std::span<const double> genre_prior() const { return prior_; }

  // Argmax genre for the users who rated a movie at this level. `scratch`
  // may provide a reusable buffer of genres().size() doubles.
  uint32_t classify(int rating_level, std::span<const uint32_t> user_row,
                    std::span<double> scratch = {}) const;

 private:
  friend GenrePredictor train(const RatingMatrices&, const GenreLabels&,
                              std::span<const uint32_t>, LabelWeighting,
                              std::span<const int>);

  std::array<NBModel, kRatingLevels> models_;
  std::array<bool, kRatingLevels> fitted_{};
  std::vector<double> prior_;
  ClassSet genres_;
  uint32_t user_count_ = 0;
};

// Fit one model per requested rating level from the training movies.
// Every training movie contributes its label weight to the prior even when
// its row at a level is empty (the prior averages over all training movies,
// not just the rated ones), and since it does not depend on the level it is
// computed once and shared. Throws ConfigError on an empty training set.
GenrePredictor train(const RatingMatrices& matrices, const GenreLabels& labels,
                     std::span<const uint32_t> training_movies,
                     LabelWeighting weighting = LabelWeighting::fractional,
                     std::span<const int> rating_levels = kAllRatingLevels);

struct Prediction {
  uint32_t genre = 0;
  std::vector<double> log_posterior;  // normalized, one entry per genre
};

// Classify a movie row with the level-k model and report the normalized
// per-genre log posterior alongside the winning genre.
Prediction predict(const GenrePredictor& predictor, int rating_level,
                   std::span<const uint32_t> user_row);

// The figure data: P(u|g) rows and per-movie log P(m|g) + log P(g) scores.
struct PredictorTables {
  uint32_t user_count = 0;
  uint32_t genre_count = 0;
  std::vector<double> user_given_genre;   // genre-major: [g * user_count + u]
  std::vector<uint32_t> movies;           // dense movie indices, input order
  std::vector<double> movie_log_scores;   // movie-major: [i * genre_count + g]
};

PredictorTables export_tables(const GenrePredictor& predictor, int rating_level,
                              std::span<const uint32_t> movies,
                              const RatingMatrices& matrices);

}  // namespace genre_bayes
