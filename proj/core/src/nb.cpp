#include "genre_bayes/nb.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace genre_bayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double NBModel::log_prior(uint32_t cls) const {
  if (cls >= class_count()) {
    throw UsageError("class id " + std::to_string(cls) + " out of range");
  }
  return log_prior_[cls];
}

double NBModel::log_token_prob(uint32_t cls, uint32_t token) const {
  if (cls >= class_count()) {
    throw UsageError("class id " + std::to_string(cls) + " out of range");
  }
  if (token >= vocab_size_) {
    throw UsageError("token id " + std::to_string(token) + " out of range");
  }
  return log_prob_[size_t(token) * class_count() + cls];
}

std::span<const double> NBModel::token_row(uint32_t token) const {
  if (token >= vocab_size_) {
    throw UsageError("token id " + std::to_string(token) + " out of range");
  }
  return {log_prob_.data() + size_t(token) * class_count(), class_count()};
}

NBModel fit(std::span<const ExampleView> examples, const Vocabulary& vocabulary,
            const ClassSet& classes, const FitOptions& options) {
  if (vocabulary.size == 0) throw ConfigError("fit: empty vocabulary");
  const uint32_t class_count = classes.size();
  if (class_count < 2) throw ConfigError("fit: need at least two classes");
  if (examples.empty()) throw ConfigError("fit: no training examples");
  if (!options.fixed_prior.empty() &&
      options.fixed_prior.size() != class_count) {
    throw UsageError("fit: fixed prior has wrong class count");
  }

  const size_t vocab = vocabulary.size;
  const bool fractional = options.weighting == LabelWeighting::fractional;

  std::vector<double> counts(vocab * class_count, 0.0);  // N(w,c), token-major
  std::vector<double> totals(class_count, 0.0);          // sum_w N(w,c)
  std::vector<double> prior_acc(class_count, 0.0);

  for (const ExampleView& example : examples) {
    double weight_sum = 0.0;
    for (const WeightedLabel& label : example.labels) {
      if (label.cls >= class_count) {
        throw UsageError("fit: class id " + std::to_string(label.cls) +
                         " out of range");
      }
      if (!(label.weight >= 0.0 && label.weight <= 1.0)) {
        throw UsageError("fit: label weight outside [0,1]");
      }
      weight_sum += label.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
      throw UsageError("fit: label weights of an example must sum to 1");
    }
    for (const WeightedLabel& label : example.labels) {
      prior_acc[label.cls] += label.weight;
    }
    for (const TokenEntry& entry : example.tokens) {
      if (entry.token >= vocab) {
        throw UsageError("fit: token id " + std::to_string(entry.token) +
                         " out of range");
      }
      if (entry.count == 0) {
        throw UsageError("fit: zero-count token entry");
      }
      double* cell = counts.data() + size_t(entry.token) * class_count;
      const double count = double(entry.count);
      for (const WeightedLabel& label : example.labels) {
        const double weight =
            fractional ? label.weight : (label.weight > 0.0 ? 1.0 : 0.0);
        const double add = weight * count;
        cell[label.cls] += add;
        totals[label.cls] += add;
      }
    }
  }

  NBModel model;
  model.vocab_size_ = vocabulary.size;
  model.classes_ = classes;

  // Laplace's Law of succession: P(w|c) = (1 + N(w,c)) / (|V| + sum_w N(w,c)).
  // Unseen tokens share the per-class floor 1 / (|V| + total).
  model.log_prob_.resize(vocab * class_count);
  std::vector<double> floor_term(class_count);
  for (uint32_t c = 0; c < class_count; ++c) {
    floor_term[c] = -std::log(double(vocab) + totals[c]);
  }
  for (size_t w = 0; w < vocab; ++w) {
    const double* cnt = counts.data() + w * class_count;
    double* out = model.log_prob_.data() + w * class_count;
    for (uint32_t c = 0; c < class_count; ++c) {
      out[c] = cnt[c] == 0.0 ? floor_term[c]
                             : std::log1p(cnt[c]) + floor_term[c];
    }
  }

  model.log_prior_.resize(class_count);
  const double example_count = double(examples.size());
  for (uint32_t c = 0; c < class_count; ++c) {
    const double prior = options.fixed_prior.empty()
                             ? prior_acc[c] / example_count
                             : options.fixed_prior[c];
    if (prior > 0.0) {
      model.log_prior_[c] = std::log(prior);
    } else {
      model.log_prior_[c] = kNegInf;
      model.zero_prior_classes_.push_back(c);
    }
  }
  return model;
}

NBModel fit(std::span<const LabeledExample> examples,
            const Vocabulary& vocabulary, const ClassSet& classes,
            const FitOptions& options) {
  std::vector<ExampleView> views;
  views.reserve(examples.size());
  for (const LabeledExample& example : examples) views.push_back(example.view());
  return fit(std::span<const ExampleView>(views), vocabulary, classes, options);
}

double log_likelihood(const NBModel& model, std::span<const TokenEntry> document,
                      uint32_t cls) {
  const uint32_t class_count = model.class_count();
  if (cls >= class_count) {
    throw UsageError("class id " + std::to_string(cls) + " out of range");
  }
  double acc = 0.0;
  for (const TokenEntry& entry : document) {
    if (entry.count == 0) throw UsageError("zero-count token entry");
    acc += double(entry.count) * model.token_row(entry.token)[cls];
  }
  return acc;
}

double log_likelihood(const NBModel& model, std::span<const uint32_t> tokens,
                      uint32_t cls) {
  const uint32_t class_count = model.class_count();
  if (cls >= class_count) {
    throw UsageError("class id " + std::to_string(cls) + " out of range");
  }
  double acc = 0.0;
  for (uint32_t token : tokens) acc += model.token_row(token)[cls];
  return acc;
}

void unnormalized_log_scores(const NBModel& model,
                             std::span<const TokenEntry> document,
                             std::span<double> scores) {
  const uint32_t class_count = model.class_count();
  if (scores.size() != class_count) {
    throw UsageError("score buffer has wrong class count");
  }
  std::span<const double> priors = model.log_priors();
  for (uint32_t c = 0; c < class_count; ++c) scores[c] = priors[c];
  for (const TokenEntry& entry : document) {
    if (entry.count == 0) throw UsageError("zero-count token entry");
    std::span<const double> row = model.token_row(entry.token);
    const double count = double(entry.count);
    for (uint32_t c = 0; c < class_count; ++c) scores[c] += count * row[c];
  }
}

void unnormalized_log_scores(const NBModel& model,
                             std::span<const uint32_t> tokens,
                             std::span<double> scores) {
  const uint32_t class_count = model.class_count();
  if (scores.size() != class_count) {
    throw UsageError("score buffer has wrong class count");
  }
  std::span<const double> priors = model.log_priors();
  for (uint32_t c = 0; c < class_count; ++c) scores[c] = priors[c];
  for (uint32_t token : tokens) {
    std::span<const double> row = model.token_row(token);
    for (uint32_t c = 0; c < class_count; ++c) scores[c] += row[c];
  }
}

void normalize_log_posterior(std::span<double> scores) {
  double max_score = kNegInf;
  for (double s : scores) max_score = std::max(max_score, s);
  if (!(max_score > kNegInf)) return;  // every class ruled out; leave as is
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - max_score);
  const double log_sum_exp = max_score + std::log(sum);
  for (double& s : scores) s -= log_sum_exp;  // -inf stays -inf
}

std::vector<double> log_posterior(const NBModel& model,
                                  std::span<const TokenEntry> document) {
  std::vector<double> scores(model.class_count());
  unnormalized_log_scores(model, document, scores);
  normalize_log_posterior(scores);
  return scores;
}

std::vector<double> log_posterior(const NBModel& model,
                                  std::span<const uint32_t> tokens) {
  std::vector<double> scores(model.class_count());
  unnormalized_log_scores(model, tokens, scores);
  normalize_log_posterior(scores);
  return scores;
}

uint32_t argmax_class(std::span<const double> scores) {
  uint32_t best = 0;
  double best_score = kNegInf;
  bool any = false;
  for (uint32_t c = 0; c < scores.size(); ++c) {
    if (scores[c] > best_score) {  // strict: ties keep the lowest class id
      best_score = scores[c];
      best = c;
      any = true;
    }
  }
  if (!any) throw ClassificationError("all classes have zero prior");
  return best;
}

uint32_t classify(const NBModel& model, std::span<const TokenEntry> document) {
  std::vector<double> scores(model.class_count());
  unnormalized_log_scores(model, document, scores);
  return argmax_class(scores);
}

uint32_t classify(const NBModel& model, std::span<const uint32_t> tokens) {
  std::vector<double> scores(model.class_count());
  unnormalized_log_scores(model, tokens, scores);
  return argmax_class(scores);
}

}  // namespace genre_bayes
