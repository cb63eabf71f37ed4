#pragma once

// Shared test utilities: an independent linear-space Naive Bayes oracle
// (plain frequency counting, no logs, long double), random corpus generators,
// a synthetic ratings dataset with planted genre preferences, and a temp-dir
// guard. The oracle deliberately re-derives everything from counts so it
// shares no code path with the library implementation.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "genre_bayes/movielens.hpp"
#include "genre_bayes/nb.hpp"
#include "genre_bayes/types.hpp"

namespace test_support {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// linear-space oracle

struct LinearNB {
  uint32_t vocab = 0;
  uint32_t classes = 0;
  std::vector<long double> prob;   // [cls * vocab + token], linear P(w|c)
  std::vector<long double> prior;  // [cls]

  long double p(uint32_t cls, uint32_t token) const {
    return prob[size_t(cls) * vocab + token];
  }
};

inline LinearNB linear_fit(
    const std::vector<genre_bayes::LabeledExample>& examples, uint32_t vocab,
    uint32_t classes,
    genre_bayes::LabelWeighting weighting =
        genre_bayes::LabelWeighting::fractional) {
  LinearNB nb;
  nb.vocab = vocab;
  nb.classes = classes;
  std::vector<long double> counts(size_t(vocab) * classes, 0.0L);
  std::vector<long double> totals(classes, 0.0L);
  nb.prior.assign(classes, 0.0L);
  for (const genre_bayes::LabeledExample& example : examples) {
    for (const genre_bayes::WeightedLabel& label : example.labels) {
      nb.prior[label.cls] += (long double)label.weight;
      const long double weight =
          weighting == genre_bayes::LabelWeighting::fractional
              ? (long double)label.weight
              : (label.weight > 0.0 ? 1.0L : 0.0L);
      for (const genre_bayes::TokenEntry& entry : example.document) {
        const long double add = weight * (long double)entry.count;
        counts[size_t(label.cls) * vocab + entry.token] += add;
        totals[label.cls] += add;
      }
    }
  }
  nb.prob.resize(size_t(vocab) * classes);
  for (uint32_t c = 0; c < classes; ++c) {
    for (uint32_t w = 0; w < vocab; ++w) {
      nb.prob[size_t(c) * vocab + w] =
          (1.0L + counts[size_t(c) * vocab + w]) /
          ((long double)vocab + totals[c]);
    }
  }
  for (long double& p : nb.prior) p /= (long double)examples.size();
  return nb;
}

struct LinearVerdict {
  uint32_t best = 0;
  long double best_score = 0.0L;
  long double runner_up = 0.0L;  // second-best score

  // Relative gap between the top two scores; tiny gaps mean a float-level
  // tie where either winner is acceptable.
  long double gap() const {
    if (best_score <= 0.0L) return 0.0L;
    return (best_score - runner_up) / best_score;
  }
};

inline LinearVerdict linear_classify(const LinearNB& nb,
                                     const genre_bayes::TokenDocument& doc) {
  LinearVerdict verdict;
  long double best = -1.0L;
  long double second = -1.0L;
  for (uint32_t c = 0; c < nb.classes; ++c) {
    long double score = nb.prior[c];
    for (const genre_bayes::TokenEntry& entry : doc) {
      score *= std::pow(nb.p(c, entry.token), (long double)entry.count);
    }
    if (score > best) {
      second = best;
      best = score;
      verdict.best = c;
    } else if (score > second) {
      second = score;
    }
  }
  verdict.best_score = best;
  verdict.runner_up = second < 0.0L ? 0.0L : second;
  return verdict;
}

// ---------------------------------------------------------------------------
// random corpora

struct RandomCorpus {
  uint32_t vocab = 0;
  uint32_t classes = 0;
  std::vector<genre_bayes::LabeledExample> examples;
};

inline uint64_t draw(std::mt19937_64& rng, uint64_t lo, uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

inline genre_bayes::TokenDocument random_document(std::mt19937_64& rng,
                                                  uint32_t vocab,
                                                  uint32_t max_tokens,
                                                  uint32_t max_count) {
  const uint32_t distinct =
      uint32_t(draw(rng, 0, std::min(vocab, max_tokens)));
  std::set<uint32_t> tokens;
  while (tokens.size() < distinct) {
    tokens.insert(uint32_t(draw(rng, 0, vocab - 1)));
  }
  genre_bayes::TokenDocument doc;
  for (uint32_t token : tokens) {
    doc.push_back({token, uint32_t(draw(rng, 1, max_count))});
  }
  return doc;
}

inline std::vector<genre_bayes::WeightedLabel> random_labels(
    std::mt19937_64& rng, uint32_t classes) {
  if (classes >= 2 && draw(rng, 0, 3) == 0) {
    uint32_t a = uint32_t(draw(rng, 0, classes - 1));
    uint32_t b = uint32_t(draw(rng, 0, classes - 2));
    if (b >= a) ++b;
    return {{a, 0.5}, {b, 0.5}};
  }
  return {{uint32_t(draw(rng, 0, classes - 1)), 1.0}};
}

inline RandomCorpus random_corpus(std::mt19937_64& rng, uint32_t max_vocab,
                                  uint32_t max_classes, uint32_t max_examples,
                                  uint32_t max_tokens, uint32_t max_count) {
  RandomCorpus corpus;
  corpus.vocab = uint32_t(draw(rng, 1, max_vocab));
  corpus.classes = uint32_t(draw(rng, 2, max_classes));
  const uint32_t example_count = uint32_t(draw(rng, 1, max_examples));
  for (uint32_t i = 0; i < example_count; ++i) {
    genre_bayes::LabeledExample example;
    example.document =
        random_document(rng, corpus.vocab, max_tokens, max_count);
    example.labels = random_labels(rng, corpus.classes);
    corpus.examples.push_back(std::move(example));
  }
  return corpus;
}

// small instances the oracle can grind through exactly: <=5 tokens,
// <=3 classes, <=4 documents
inline RandomCorpus random_small_corpus(std::mt19937_64& rng) {
  return random_corpus(rng, 5, 3, 4, 5, 3);
}

// ---------------------------------------------------------------------------
// synthetic ratings with planted preferences

struct SyntheticDataset {
  std::vector<genre_bayes::RatingEvent> events;
  genre_bayes::GenreLabels labels;
};

// Users prefer genre (user % genres); fans of a movie's first genre rate it
// 4 or 5, strangers 1..3. High rating levels therefore carry a strong genre
// signal. Deterministic for a given seed.
inline SyntheticDataset make_synthetic(uint32_t users, uint32_t movies,
                                       uint32_t genres,
                                       uint32_t raters_per_movie,
                                       uint64_t seed) {
  std::mt19937_64 rng(seed);

  std::vector<std::string> names;
  for (uint32_t g = 0; g < genres; ++g) {
    names.push_back("Genre" + std::to_string(g));
  }
  std::vector<std::vector<uint32_t>> per_movie(movies);
  for (uint32_t m = 0; m < movies; ++m) {
    per_movie[m].push_back(m % genres);
    if (m % 5 == 4) per_movie[m].push_back((m + 1) % genres);  // some 2-genre
  }

  SyntheticDataset dataset;
  dataset.labels = genre_bayes::GenreLabels::make(
      genre_bayes::ClassSet(std::move(names)), std::move(per_movie));

  int64_t timestamp = 978300000;
  for (uint32_t m = 0; m < movies; ++m) {
    const uint32_t main_genre = m % genres;
    std::set<uint32_t> raters;
    while (raters.size() < std::min(raters_per_movie, users)) {
      uint32_t user;
      if (draw(rng, 0, 3) != 0) {  // 75% fans
        const uint32_t fan_count = (users - main_genre + genres - 1) / genres;
        user = main_genre + genres * uint32_t(draw(rng, 0, fan_count - 1));
      } else {
        user = uint32_t(draw(rng, 0, users - 1));
      }
      if (!raters.insert(user).second) continue;
      const bool fan = user % genres == main_genre;
      const int rating = fan ? int(draw(rng, 4, 5)) : int(draw(rng, 1, 3));
      dataset.events.push_back(
          {user + 1, m + 1, rating, timestamp++});
    }
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// filesystem helpers

class TempDir {
 public:
  TempDir() {
    static std::atomic<uint64_t> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("genre_bayes_test_" + std::to_string(rd()) + "_" +
             std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline fs::path write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

}  // namespace test_support
