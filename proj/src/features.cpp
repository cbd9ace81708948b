#include "msacheck/features.hpp"

#include <cmath>
#include <map>
#include <string>

#include "msacheck/error.hpp"
#include "msacheck/text.hpp"

namespace msacheck {

namespace {

constexpr std::uint64_t kSentenceSeed = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kContextSeed = 0xc2b2ae3d27d4eb4fULL;

void check_dimension(std::uint32_t dimension) {
  if (dimension < 2 || (dimension & (dimension - 1)) != 0) {
    throw Error(ErrorKind::InvalidArgument, "feature dimension must be a power of two >= 2");
  }
}

void add_counts(std::map<std::uint32_t, double>& acc, std::string_view s, std::uint64_t seed,
                std::uint32_t offset, std::uint32_t half) {
  std::map<std::string, int> counts;
  for (auto& t : text::normalized_tokens(s)) ++counts[t];
  for (const auto& [tok, n] : counts) {
    auto idx = offset + static_cast<std::uint32_t>(text::fnv1a64(tok, seed) & (half - 1));
    acc[idx] += 1.0 + std::log(static_cast<double>(n));
  }
}

}  // namespace

double FeatureVector::dot(const std::vector<double>& dense) const {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight * dense[e.index];
  return s;
}

std::uint32_t sentence_feature_index(std::string_view normalized_token, std::uint32_t dimension) {
  check_dimension(dimension);
  return static_cast<std::uint32_t>(text::fnv1a64(normalized_token, kSentenceSeed) &
                                    (dimension / 2 - 1));
}

FeatureVector featurize(std::string_view sentence, const ContextWindow& context,
                        std::uint32_t dimension) {
  check_dimension(dimension);
  const std::uint32_t half = dimension / 2;
  std::map<std::uint32_t, double> acc;
  add_counts(acc, sentence, kSentenceSeed, 0, half);
  // Before and after share one context bag.
  std::string ctx = context.before_text;
  if (!context.after_text.empty()) {
    ctx += ' ';
    ctx += context.after_text;
  }
  add_counts(acc, ctx, kContextSeed, half, half);

  FeatureVector fv;
  fv.dimension = dimension;
  fv.entries.reserve(acc.size());
  for (const auto& [i, w] : acc) fv.entries.push_back({i, w});
  return fv;
}

}  // namespace msacheck
