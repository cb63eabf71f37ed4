#include "genre_bayes/types.hpp"

#include <unordered_set>
#include <utility>

namespace genre_bayes {

ClassSet::ClassSet(std::vector<std::string> names) {
  if (names.size() < 2) {
    throw ConfigError("class set needs at least two classes, got " +
                      std::to_string(names.size()));
  }
  std::unordered_set<std::string_view> seen;
  for (const std::string& name : names) {
    if (!seen.insert(name).second) {
      throw ConfigError("duplicate class name: " + name);
    }
  }
  names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
}

const std::string& ClassSet::name(uint32_t id) const {
  if (id >= size()) {
    throw UsageError("class id " + std::to_string(id) + " out of range");
  }
  return (*names_)[id];
}

std::span<const std::string> ClassSet::names() const {
  if (!names_) return {};
  return {names_->data(), names_->size()};
}

}  // namespace genre_bayes
