#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "msacheck/corpus.hpp"

namespace msacheck {

inline constexpr std::uint32_t kDefaultFeatureDimension = 1u << 18;

struct FeatureEntry {
  std::uint32_t index = 0;
  double weight = 0.0;
  bool operator==(const FeatureEntry&) const = default;
};

// Sparse hashed bag of words. Entries are sorted by index and unique.
struct FeatureVector {
  std::uint32_t dimension = kDefaultFeatureDimension;
  std::vector<FeatureEntry> entries;

  bool empty() const { return entries.empty(); }
  double dot(const std::vector<double>& dense) const;
  bool operator==(const FeatureVector&) const = default;
};

// Lowercased, edge-stripped unigrams with sublinear tf (1 + ln count). The
// target sentence hashes into [0, dim/2), context into [dim/2, dim).
FeatureVector featurize(std::string_view sentence, const ContextWindow& context,
                        std::uint32_t dimension = kDefaultFeatureDimension);

// Index a normalized token lands on in the sentence half of the space.
std::uint32_t sentence_feature_index(std::string_view normalized_token, std::uint32_t dimension);

}  // namespace msacheck
