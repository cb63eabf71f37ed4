#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace genre_bayes {

// Input files that do not parse.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Run configurations that cannot produce a result (empty training sets,
// fractions outside (0,1), missing data files, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// API misuse: ids out of range and similar programming errors.
struct UsageError : std::logic_error {
  using std::logic_error::logic_error;
};

// Every class ruled out (all priors zero). Cannot happen after a successful fit.
struct ClassificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense token id space 0..size-1. Tokens are words in text classification,
// users here.
struct Vocabulary {
  uint32_t size = 0;
};

// Immutable set of class labels with dense ids assigned by position.
// Copies are cheap; the name table is shared.
class ClassSet {
 public:
  ClassSet() = default;

  // Requires at least two distinct names.
  explicit ClassSet(std::vector<std::string> names);

  uint32_t size() const {
    return names_ ? static_cast<uint32_t>(names_->size()) : 0;
  }
  const std::string& name(uint32_t id) const;
  std::span<const std::string> names() const;

 private:
  std::shared_ptr<const std::vector<std::string>> names_;
};

// One token of a sparse document together with its occurrence count N(w).
// Absent tokens have N(w) = 0 and are simply not listed.
struct TokenEntry {
  uint32_t token = 0;
  uint32_t count = 0;
};

// Sparse document: one entry per distinct token that occurs (count >= 1 each).
using TokenDocument = std::vector<TokenEntry>;

// Class membership weight of a training example. The weights of one example
// sum to 1; a movie carrying N genres contributes 1/N per genre.
struct WeightedLabel {
  uint32_t cls = 0;
  double weight = 0.0;
};

// Non-owning view of a training example; what fit() consumes.
struct ExampleView {
  std::span<const TokenEntry> tokens;
  std::span<const WeightedLabel> labels;
};

// Owning training example.
struct LabeledExample {
  TokenDocument document;
  std::vector<WeightedLabel> labels;

  ExampleView view() const { return {document, labels}; }
};

}  // namespace genre_bayes
