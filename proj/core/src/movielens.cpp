#include "genre_bayes/movielens.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <string_view>
#include <utility>

namespace genre_bayes {

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, size_t line_no,
                             const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

template <typename Int>
bool parse_int(std::string_view field, Int& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !field.empty();
}

// The ml-1m distribution is Latin-1, not UTF-8; expand high bytes so titles
// are valid UTF-8 downstream.
std::string latin1_to_utf8(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (unsigned char ch : in) {
    if (ch < 0x80) {
      out.push_back(char(ch));
    } else {
      out.push_back(char(0xC0 | (ch >> 6)));
      out.push_back(char(0x80 | (ch & 0x3F)));
    }
  }
  return out;
}

std::ifstream open_or_fail(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

bool next_line(std::ifstream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

std::vector<RatingEvent> parse_ratings(const std::filesystem::path& path) {
  std::ifstream in = open_or_fail(path);
  std::vector<RatingEvent> events;
  std::string line;
  size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string_view view(line);

    RatingEvent event;
    uint32_t rating = 0;
    std::array<std::string_view, 4> fields;
    size_t start = 0;
    for (int i = 0; i < 4; ++i) {
      const size_t sep = view.find("::", start);
      if (i < 3 ? sep == std::string_view::npos
                : sep != std::string_view::npos) {
        parse_fail(path, line_no,
                   "expected UserID::MovieID::Rating::Timestamp");
      }
      fields[i] = view.substr(start, (i < 3 ? sep : view.size()) - start);
      start = (i < 3) ? sep + 2 : start;
    }
    if (!parse_int(fields[0], event.user_id) ||
        !parse_int(fields[1], event.movie_id) ||
        !parse_int(fields[2], rating) ||
        !parse_int(fields[3], event.timestamp)) {
      parse_fail(path, line_no, "non-numeric field");
    }
    if (rating < 1 || rating > 5) {
      parse_fail(path, line_no,
                 "rating " + std::to_string(rating) + " outside 1..5");
    }
    event.rating = int(rating);
    events.push_back(event);
  }
  return events;
}

GenreLabels GenreLabels::make(ClassSet genres,
                              std::vector<std::vector<uint32_t>> per_movie_genres,
                              std::vector<uint32_t> raw_ids,
                              std::vector<std::string> titles) {
  GenreLabels labels;
  labels.genres_ = std::move(genres);
  const size_t movie_count = per_movie_genres.size();
  if (raw_ids.empty()) {
    raw_ids.resize(movie_count);
    for (size_t m = 0; m < movie_count; ++m) raw_ids[m] = uint32_t(m + 1);
  }
  if (titles.empty()) {
    titles.reserve(movie_count);
    for (size_t m = 0; m < movie_count; ++m) {
      titles.push_back("Movie " + std::to_string(raw_ids[m]));
    }
  }
  if (raw_ids.size() != movie_count || titles.size() != movie_count) {
    throw UsageError("GenreLabels::make: mismatched column lengths");
  }
  labels.raw_ids_ = std::move(raw_ids);
  labels.titles_ = std::move(titles);
  labels.genre_offsets_.reserve(movie_count + 1);
  labels.genre_offsets_.push_back(0);
  for (size_t m = 0; m < movie_count; ++m) {
    const std::vector<uint32_t>& ids = per_movie_genres[m];
    if (ids.empty()) throw UsageError("GenreLabels::make: movie with no genre");
    for (uint32_t g : ids) {
      if (g >= labels.genres_.size()) {
        throw UsageError("GenreLabels::make: genre id out of range");
      }
      labels.genre_ids_flat_.push_back(g);
    }
    labels.genre_offsets_.push_back(labels.genre_ids_flat_.size());
  }
  for (size_t m = 0; m < movie_count; ++m) {
    if (!labels.index_.emplace(labels.raw_ids_[m], uint32_t(m)).second) {
      throw UsageError("GenreLabels::make: duplicate movie id");
    }
  }
  return labels;
}

std::span<const uint32_t> GenreLabels::genre_ids(uint32_t movie) const {
  if (movie >= movie_count()) {
    throw UsageError("movie index " + std::to_string(movie) + " out of range");
  }
  const size_t begin = genre_offsets_[movie];
  return {genre_ids_flat_.data() + begin, genre_offsets_[movie + 1] - begin};
}

double GenreLabels::label_weight(uint32_t movie) const {
  return 1.0 / double(genre_ids(movie).size());
}

bool GenreLabels::movie_has_genre(uint32_t movie, uint32_t genre) const {
  for (uint32_t g : genre_ids(movie)) {
    if (g == genre) return true;
  }
  return false;
}

uint32_t GenreLabels::raw_id(uint32_t movie) const {
  if (movie >= movie_count()) {
    throw UsageError("movie index " + std::to_string(movie) + " out of range");
  }
  return raw_ids_[movie];
}

const std::string& GenreLabels::title(uint32_t movie) const {
  if (movie >= movie_count()) {
    throw UsageError("movie index " + std::to_string(movie) + " out of range");
  }
  return titles_[movie];
}

std::optional<uint32_t> GenreLabels::index_of(uint32_t raw_movie_id) const {
  auto it = index_.find(raw_movie_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GenreLabels parse_movies(const std::filesystem::path& path) {
  std::ifstream in = open_or_fail(path);

  struct RawMovie {
    uint32_t id;
    std::string title;
    std::vector<std::string> genres;
  };
  std::vector<RawMovie> movies;
  std::map<std::string, uint32_t> genre_names;  // sorted -> lexicographic ids

  std::string line;
  size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string_view view(line);

    const size_t first = view.find("::");
    const size_t last = view.rfind("::");
    if (first == std::string_view::npos || last == first) {
      parse_fail(path, line_no, "expected MovieID::Title::Genres");
    }
    RawMovie movie;
    if (!parse_int(view.substr(0, first), movie.id)) {
      parse_fail(path, line_no, "non-numeric movie id");
    }
    movie.title = latin1_to_utf8(view.substr(first + 2, last - first - 2));

    std::string_view genre_field = view.substr(last + 2);
    if (genre_field.empty()) parse_fail(path, line_no, "empty genre field");
    size_t start = 0;
    while (start <= genre_field.size()) {
      size_t bar = genre_field.find('|', start);
      if (bar == std::string_view::npos) bar = genre_field.size();
      std::string_view genre = genre_field.substr(start, bar - start);
      if (genre.empty()) parse_fail(path, line_no, "empty genre name");
      movie.genres.emplace_back(genre);
      start = bar + 1;
      if (bar == genre_field.size()) break;
    }
    for (const std::string& genre : movie.genres) {
      genre_names.emplace(genre, 0);
    }
    movies.push_back(std::move(movie));
  }

  uint32_t next_id = 0;
  for (auto& [name, id] : genre_names) id = next_id++;

  std::vector<std::string> names;
  names.reserve(genre_names.size());
  for (const auto& [name, id] : genre_names) names.push_back(name);
  ClassSet genres(std::move(names));

  std::vector<std::vector<uint32_t>> per_movie;
  std::vector<uint32_t> raw_ids;
  std::vector<std::string> titles;
  per_movie.reserve(movies.size());
  raw_ids.reserve(movies.size());
  titles.reserve(movies.size());
  for (RawMovie& movie : movies) {
    std::vector<uint32_t> ids;
    ids.reserve(movie.genres.size());
    for (const std::string& genre : movie.genres) {
      ids.push_back(genre_names.at(genre));
    }
    per_movie.push_back(std::move(ids));
    raw_ids.push_back(movie.id);
    titles.push_back(std::move(movie.title));
  }

  try {
    return GenreLabels::make(std::move(genres), std::move(per_movie),
                             std::move(raw_ids), std::move(titles));
  } catch (const UsageError& err) {
    // duplicate raw movie ids surface here
    throw ParseError(path.string() + ": " + err.what());
  }
}

std::span<const uint32_t> SparseBinaryMatrix::row(uint32_t movie) const {
  if (movie >= movie_count()) {
    throw UsageError("movie index " + std::to_string(movie) + " out of range");
  }
  const size_t begin = offsets_[movie];
  return {indices_.data() + begin, offsets_[movie + 1] - begin};
}

const SparseBinaryMatrix& RatingMatrices::level(int rating) const {
  if (rating < 1 || rating > kRatingLevels) {
    throw UsageError("rating level " + std::to_string(rating) +
                     " outside 1..5");
  }
  return by_level[rating - 1];
}

size_t RatingMatrices::entry_count() const {
  size_t total = 0;
  for (const SparseBinaryMatrix& matrix : by_level) {
    total += matrix.entry_count();
  }
  return total;
}

RatingMatrices build_matrices(std::span<const RatingEvent> events,
                              const GenreLabels& labels) {
  RatingMatrices out;
  const uint32_t movie_count = labels.movie_count();

  // Dense user ids: sorted distinct raw ids.
  out.user_ids.reserve(events.size());
  for (const RatingEvent& event : events) out.user_ids.push_back(event.user_id);
  std::sort(out.user_ids.begin(), out.user_ids.end());
  out.user_ids.erase(std::unique(out.user_ids.begin(), out.user_ids.end()),
                     out.user_ids.end());
  out.user_index.reserve(out.user_ids.size());
  for (uint32_t i = 0; i < out.user_ids.size(); ++i) {
    out.user_index.emplace(out.user_ids[i], i);
  }
  const uint32_t user_count = out.user_count();

  // Bucket events per movie, keeping file order within each movie.
  struct Entry {
    uint32_t user;
    uint8_t level;  // rating - 1
  };
  std::vector<size_t> bucket_offsets(movie_count + 1, 0);
  std::vector<uint32_t> movie_of;  // dense movie per kept event
  movie_of.reserve(events.size());
  for (const RatingEvent& event : events) {
    const std::optional<uint32_t> movie = labels.index_of(event.movie_id);
    if (!movie) {
      ++out.dropped_unlabeled;
      movie_of.push_back(movie_count);  // sentinel: skip on the fill pass
      continue;
    }
    movie_of.push_back(*movie);
    ++bucket_offsets[*movie + 1];
  }
  for (uint32_t m = 0; m < movie_count; ++m) {
    bucket_offsets[m + 1] += bucket_offsets[m];
  }
  std::vector<Entry> buckets(bucket_offsets[movie_count]);
  {
    std::vector<size_t> cursor(bucket_offsets.begin(),
                               bucket_offsets.end() - 1);
    for (size_t i = 0; i < events.size(); ++i) {
      const uint32_t movie = movie_of[i];
      if (movie == movie_count) continue;
      buckets[cursor[movie]++] = {out.user_index.at(events[i].user_id),
                                  uint8_t(events[i].rating - 1)};
    }
  }

  // First occurrence of a (user, movie) pair wins; later ones are duplicates.
  // seen_epoch stamps avoid clearing a per-movie set.
  std::vector<uint32_t> seen_epoch(user_count, 0);
  std::array<std::vector<size_t>, kRatingLevels> level_counts;
  for (auto& counts : level_counts) counts.assign(movie_count + 1, 0);
  std::vector<Entry> kept(buckets.size());
  size_t kept_size = 0;
  std::vector<size_t> kept_offsets(movie_count + 1, 0);
  for (uint32_t m = 0; m < movie_count; ++m) {
    const uint32_t epoch = m + 1;
    for (size_t i = bucket_offsets[m]; i < bucket_offsets[m + 1]; ++i) {
      const Entry entry = buckets[i];
      if (seen_epoch[entry.user] == epoch) {
        ++out.dropped_duplicates;
        continue;
      }
      seen_epoch[entry.user] = epoch;
      kept[kept_size++] = entry;
      ++level_counts[entry.level][m + 1];
    }
    kept_offsets[m + 1] = kept_size;
  }

  for (int level = 0; level < kRatingLevels; ++level) {
    SparseBinaryMatrix& matrix = out.by_level[level];
    matrix.user_count_ = user_count;
    matrix.offsets_.assign(movie_count + 1, 0);
    for (uint32_t m = 0; m < movie_count; ++m) {
      matrix.offsets_[m + 1] = matrix.offsets_[m] + level_counts[level][m + 1];
    }
    matrix.indices_.resize(matrix.offsets_[movie_count]);
  }
  {
    std::array<std::vector<size_t>, kRatingLevels> cursor;
    for (int level = 0; level < kRatingLevels; ++level) {
      cursor[level].assign(out.by_level[level].offsets_.begin(),
                           out.by_level[level].offsets_.end() - 1);
    }
    for (uint32_t m = 0; m < movie_count; ++m) {
      for (size_t i = kept_offsets[m]; i < kept_offsets[m + 1]; ++i) {
        const Entry entry = kept[i];
        out.by_level[entry.level].indices_[cursor[entry.level][m]++] =
            entry.user;
      }
    }
  }
  for (SparseBinaryMatrix& matrix : out.by_level) {
    for (uint32_t m = 0; m < movie_count; ++m) {
      auto begin = matrix.indices_.begin() + matrix.offsets_[m];
      auto end = matrix.indices_.begin() + matrix.offsets_[m + 1];
      std::sort(begin, end);
    }
  }
  return out;
}

CorpusStats corpus_stats(std::span<const RatingEvent> events,
                         const GenreLabels& labels) {
  CorpusStats stats;
  stats.movie_count = labels.movie_count();
  stats.rating_count = events.size();

  std::vector<uint32_t> users;
  users.reserve(events.size());
  for (const RatingEvent& event : events) {
    users.push_back(event.user_id);
    stats.rating_histogram[event.rating - 1] += 1;
  }
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  stats.user_count = uint32_t(users.size());

  size_t max_genres = 0;
  for (uint32_t m = 0; m < labels.movie_count(); ++m) {
    max_genres = std::max(max_genres, labels.genre_ids(m).size());
  }
  std::vector<uint64_t> counts(max_genres, 0);
  for (uint32_t m = 0; m < labels.movie_count(); ++m) {
    counts[labels.genre_ids(m).size() - 1] += 1;
  }
  stats.genre_multiplicity.resize(max_genres);
  for (size_t n = 0; n < max_genres; ++n) {
    stats.genre_multiplicity[n] =
        double(counts[n]) / double(labels.movie_count());
  }
  return stats;
}

}  // namespace genre_bayes
