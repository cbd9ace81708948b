#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "msacheck/backend.hpp"
#include "msacheck/corpus.hpp"
#include "msacheck/criteria.hpp"
#include "msacheck/error.hpp"
#include "msacheck/execution.hpp"

namespace msacheck {

struct RelevancePrediction {
  std::size_t sentence_index = 0;
  Criterion criterion = Criterion::Approval;
  double probability = 0.0;
  bool relevant = false;
  double threshold = 0.5;
  std::string backend_id;
  bool operator==(const RelevancePrediction&) const = default;
};

// Per-criterion decision thresholds; anything not overridden uses `fallback`.
struct Thresholds {
  double fallback = 0.5;
  std::array<std::optional<double>, kCriterionCount> per_criterion{};

  double at(Criterion c) const {
    const auto& t = per_criterion[index_of(c)];
    return t ? *t : fallback;
  }
  void validate() const;  // every value in [0,1], else InvalidArgument
};

// Throws InvalidArgument for tau outside [0,1]; backend errors propagate.
RelevancePrediction predict(const RelevanceBackend& backend, const Sentence& sentence,
                            const ContextWindow& context, Criterion c, double tau);

struct PredictionCell {
  std::optional<RelevancePrediction> prediction;
  std::optional<ErrorKind> error;
  std::string message;

  bool ok() const { return prediction.has_value(); }
  bool operator==(const PredictionCell&) const = default;
};

// kCriterionCount rows x one column per sentence.
class PredictionMatrix {
 public:
  PredictionMatrix() = default;
  explicit PredictionMatrix(std::size_t sentences);

  std::size_t sentence_count() const { return sentences_; }
  std::size_t size() const { return cells_.size(); }
  PredictionCell& at(Criterion c, std::size_t sentence);
  const PredictionCell& at(Criterion c, std::size_t sentence) const;

  std::size_t failed_cells() const;
  bool operator==(const PredictionMatrix&) const = default;

 private:
  std::size_t sentences_ = 0;
  std::vector<PredictionCell> cells_;
};

// Context windows are built once per sentence; failures land in cells and
// never abort the matrix.
PredictionMatrix predict_statement(const RelevanceBackend& backend, const Statement& statement,
                                   std::size_t budget, const Thresholds& thresholds,
                                   Execution execution = Execution::Parallel);

}  // namespace msacheck
