#pragma once

// Multinomial Naive Bayes over a dense token vocabulary: Laplace-smoothed
// token probabilities, class priors averaged from (possibly fractional)
// example labels, and log-space inference throughout. Linear-space products
// underflow for realistic documents, so only tests ever leave log space.

#include <span>
#include <vector>

#include "genre_bayes/types.hpp"

namespace genre_bayes {

// How fractional class labels weight the token counts N(w,c):
// `fractional` charges count * weight to each labeled class, `full` charges
// the whole count to every labeled class. Priors always use the fractional
// weights.
enum class LabelWeighting { fractional, full };

struct FitOptions {
  LabelWeighting weighting = LabelWeighting::fractional;
  // Precomputed class prior (linear scale, sums to 1). When non-empty, fit
  // reuses it instead of re-estimating; callers fitting several models from
  // the same labels compute the prior once.
  std::span<const double> fixed_prior = {};
};

class NBModel {
 public:
  NBModel() = default;

  uint32_t vocab_size() const { return vocab_size_; }
  uint32_t class_count() const { return classes_.size(); }
  const ClassSet& classes() const { return classes_; }

  // Natural log of P(c); -inf for classes with zero prior weight.
  double log_prior(uint32_t cls) const;
  std::span<const double> log_priors() const { return log_prior_; }

  // Natural log of P(w|c); finite and <= 0 for every cell after fit.
  double log_token_prob(uint32_t cls, uint32_t token) const;

  // All classes for one token, contiguous. Hot path of classification.
  std::span<const double> token_row(uint32_t token) const;

  // Classes that received zero prior weight during fit. They keep prior 0,
  // can never win the argmax, and are reported here instead of failing fit
  // (small random training splits can miss rare classes entirely).
  std::span<const uint32_t> zero_prior_classes() const {
    return zero_prior_classes_;
  }

 private:
  friend NBModel fit(std::span<const ExampleView>, const Vocabulary&,
                     const ClassSet&, const FitOptions&);

  uint32_t vocab_size_ = 0;
  ClassSet classes_;
  std::vector<double> log_prior_;
  std::vector<double> log_prob_;  // token-major: [token * class_count + cls]
  std::vector<uint32_t> zero_prior_classes_;
};

// Estimate priors and smoothed token probabilities from weighted examples.
//   prior[c]      = sum of weight(c) over examples / #examples
//   P(w|c)        = (1 + N(w,c)) / (|V| + sum_w N(w,c))
// where N(w,c) accumulates count(w) scaled per FitOptions::weighting.
// Throws ConfigError on an empty example list, UsageError on invalid ids,
// counts or weights.
NBModel fit(std::span<const ExampleView> examples, const Vocabulary& vocabulary,
            const ClassSet& classes, const FitOptions& options = {});
NBModel fit(std::span<const LabeledExample> examples,
            const Vocabulary& vocabulary, const ClassSet& classes,
            const FitOptions& options = {});

// log P(d|c): sum over entries of count * log P(token|cls). Iterates only the
// sparse entries; absent tokens contribute log(p) * 0 = 0 exactly.
double log_likelihood(const NBModel& model, std::span<const TokenEntry> document,
                      uint32_t cls);
// Same for a categorical document (every count 1) given as a token list.
double log_likelihood(const NBModel& model, std::span<const uint32_t> tokens,
                      uint32_t cls);

// log P(c|d) for every class, normalized so the exponentials sum to 1.
// Uses the max-shift before exponentiation; zero-prior classes stay -inf.
std::vector<double> log_posterior(const NBModel& model,
                                  std::span<const TokenEntry> document);
std::vector<double> log_posterior(const NBModel& model,
                                  std::span<const uint32_t> tokens);

// Argmax of log prior + log likelihood; ties go to the lowest class id.
// Throws ClassificationError if every class is at -inf.
uint32_t classify(const NBModel& model, std::span<const TokenEntry> document);
uint32_t classify(const NBModel& model, std::span<const uint32_t> tokens);

// Scratch-buffer variants for callers classifying in a loop. `scores` must
// hold class_count() elements and is left with the unnormalized log scores.
void unnormalized_log_scores(const NBModel& model,
                             std::span<const TokenEntry> document,
                             std::span<double> scores);
void unnormalized_log_scores(const NBModel& model,
                             std::span<const uint32_t> tokens,
                             std::span<double> scores);

// In-place max-shift normalization so that sum_c exp(scores[c]) = 1.
void normalize_log_posterior(std::span<double> scores);

uint32_t argmax_class(std::span<const double> scores);

}  // namespace genre_bayes
