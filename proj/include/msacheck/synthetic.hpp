#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msacheck/criteria.hpp"
#include "msacheck/native_model.hpp"

namespace msacheck {

// Cue words planted in positive sentences; the sets are pairwise disjoint and
// disjoint from the filler vocabulary.
const std::vector<std::string>& synthetic_keywords(Criterion c);
const std::vector<std::string>& synthetic_filler();

struct SyntheticCorpusOptions {
  std::size_t per_criterion = 500;  // positives per criterion
  std::size_t negatives = 500;      // filler-only sentences
  std::size_t context_words = 0;    // filler words on each side
  std::uint64_t seed = 7;
};

// Linearly separable corpus: each positive sentence carries one or two
// keywords of its criterion among filler words. Shuffled deterministically.
std::vector<LabeledExample> synthetic_corpus(const SyntheticCorpusOptions& options);

}  // namespace msacheck
