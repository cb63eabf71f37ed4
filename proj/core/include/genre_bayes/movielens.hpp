#pragma once

// MovieLens 1M ingestion: `::`-delimited ratings.dat / movies.dat (Latin-1),
// per-rating-level sparse binary matrices, and corpus statistics.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "genre_bayes/types.hpp"

namespace genre_bayes {

inline constexpr int kRatingLevels = 5;

struct RatingEvent {
  uint32_t user_id = 0;   // raw dataset id
  uint32_t movie_id = 0;  // raw dataset id
  int rating = 0;         // 1..5
  int64_t timestamp = 0;  // parsed, unused downstream
};

// One line per event, file order. Lines are `UserID::MovieID::Rating::Timestamp`.
// Throws ParseError (with the line number) on malformed lines or ratings
// outside 1..5.
std::vector<RatingEvent> parse_ratings(const std::filesystem::path& path);

// Movie catalog from movies.dat: per-movie genre memberships with fractional
// 1/N weights, plus the raw-id -> dense-index map. Genre ids are assigned by
// lexicographic order of the distinct genre strings, so they are stable for
// given file bytes. Titles are transcoded Latin-1 -> UTF-8 and carried for
// display only.
class GenreLabels {
 public:
  GenreLabels() = default;

  // Assemble a catalog directly; fixtures and synthetic corpora use this.
  // raw_ids defaults to 1..N, titles to "Movie <raw id>".
  static GenreLabels make(ClassSet genres,
                          std::vector<std::vector<uint32_t>> per_movie_genres,
                          std::vector<uint32_t> raw_ids = {},
                          std::vector<std::string> titles = {});

  const ClassSet& genres() const { return genres_; }
  uint32_t movie_count() const {
    return static_cast<uint32_t>(raw_ids_.size());
  }

  // Genre ids of one movie; never empty.
  std::span<const uint32_t> genre_ids(uint32_t movie) const;
  // Label weight, 1/N for a movie with N genres.
  double label_weight(uint32_t movie) const;
  bool movie_has_genre(uint32_t movie, uint32_t genre) const;

  uint32_t raw_id(uint32_t movie) const;
  const std::string& title(uint32_t movie) const;
  std::optional<uint32_t> index_of(uint32_t raw_movie_id) const;

 private:
  friend GenreLabels parse_movies(const std::filesystem::path&);

  ClassSet genres_;
  std::vector<uint32_t> raw_ids_;
  std::vector<std::string> titles_;
  std::vector<size_t> genre_offsets_;  // movie_count + 1
  std::vector<uint32_t> genre_ids_flat_;
  std::unordered_map<uint32_t, uint32_t> index_;
};

// Lines are `MovieID::Title::Genre1|Genre2|...`. Throws ParseError on an
// empty genre field or a duplicate movie id.
GenreLabels parse_movies(const std::filesystem::path& path);

struct RatingMatrices;

// Per-movie rows of dense user indices for one rating level: an index is
// present iff R_k(u, m) = 1. Rows are sorted, unique, CSR-packed.
class SparseBinaryMatrix {
 public:
  SparseBinaryMatrix() = default;

  uint32_t user_count() const { return user_count_; }
  uint32_t movie_count() const {
    return offsets_.empty() ? 0 : static_cast<uint32_t>(offsets_.size() - 1);
  }
  size_t entry_count() const { return indices_.size(); }

  std::span<const uint32_t> row(uint32_t movie) const;

 private:
  friend RatingMatrices build_matrices(std::span<const RatingEvent>,
                                       const GenreLabels&);

  uint32_t user_count_ = 0;
  std::vector<size_t> offsets_;
  std::vector<uint32_t> indices_;
};

// The five binary matrices R_1..R_5 plus the dense user index map. The movie
// index map lives on GenreLabels (the catalog defines it); rows here are
// indexed by the same dense movie ids.
struct RatingMatrices {
  std::array<SparseBinaryMatrix, kRatingLevels> by_level;
  std::vector<uint32_t> user_ids;  // dense index -> raw id, ascending
  std::unordered_map<uint32_t, uint32_t> user_index;  // raw id -> dense index
  uint64_t dropped_unlabeled = 0;   // events for movies absent from the catalog
  uint64_t dropped_duplicates = 0;  // repeated (user, movie) pairs; first kept

  const SparseBinaryMatrix& level(int rating) const;
  uint32_t user_count() const {
    return static_cast<uint32_t>(user_ids.size());
  }
  uint32_t movie_count() const { return by_level[0].movie_count(); }
  size_t entry_count() const;
};

// Split events into the per-rating-level binary matrices. Events whose movie
// id is not in the catalog are dropped and counted; a (user, movie) pair seen
// more than once keeps its first occurrence and counts the rest as duplicates
// ("a user does not rate the same movie twice").
RatingMatrices build_matrices(std::span<const RatingEvent> events,
                              const GenreLabels& labels);

struct CorpusStats {
  uint32_t user_count = 0;   // distinct users among the events
  uint32_t movie_count = 0;  // catalog size
  uint64_t rating_count = 0;
  std::array<uint64_t, kRatingLevels> rating_histogram{};  // index k-1 = rating k
  std::vector<double> genre_multiplicity;  // index n-1 = fraction with n genres
};

CorpusStats corpus_stats(std::span<const RatingEvent> events,
                         const GenreLabels& labels);

}  // namespace genre_bayes
