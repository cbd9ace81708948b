#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "msacheck/backend.hpp"
#include "msacheck/shapley.hpp"

namespace msacheck {

std::string_view to_string(AttributionMethod m);
std::optional<AttributionMethod> parse_attribution_method(std::string_view s);

// Probability is what the classifier reports; Margin (native only) is the raw
// linear score, in which a linear head's game is additive.
enum class OutputSpace { Probability, Margin };

struct TokenAttribution {
  std::vector<std::string> tokens;
  std::vector<double> phi;
  double base_value = 0.0;
  double full_value = 0.0;
  AttributionMethod method = AttributionMethod::Exact;
  std::size_t samples_used = 0;
  bool operator==(const TokenAttribution&) const = default;
};

// Keeps the tokens in `keep`, in order, joined by single spaces.
std::string mask_tokens(const std::vector<std::string>& tokens, const Coalition& keep);

// v(S): the backend's output for the target sentence rebuilt from the tokens
// in S, with the context held fixed. v(empty) and v(all) are cached.
class SentenceGame final : public ValueFunction {
 public:
  SentenceGame(const RelevanceBackend& backend, Criterion criterion, ContextWindow context,
               std::vector<std::string> tokens, OutputSpace space = OutputSpace::Probability);

  std::size_t players() const override { return tokens_.size(); }
  double value(const Coalition& s) const override;
  std::size_t max_concurrency() const override { return backend_.max_concurrency(); }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  double evaluate(std::string_view text) const;

  const RelevanceBackend& backend_;
  Criterion criterion_;
  ContextWindow context_;
  std::vector<std::string> tokens_;
  OutputSpace space_;
  double v_empty_ = 0.0;
  double v_full_ = 0.0;
};

struct ExplainOptions {
  std::size_t exact_limit = kExactShapleyLimit;
  std::size_t kernel_budget = 2048;
  std::uint64_t seed = 0;
  OutputSpace space = OutputSpace::Probability;
  Execution execution = Execution::Parallel;
};

// Exact enumeration up to exact_limit tokens, kernel SHAP above it with a
// budget of at least 2M.
TokenAttribution explain_prediction(const RelevanceBackend& backend, std::string_view sentence,
                                    const ContextWindow& context, Criterion criterion,
                                    const ExplainOptions& options = {});

}  // namespace msacheck
