#include "msacheck/explain.hpp"

#include <algorithm>

#include "msacheck/error.hpp"
#include "msacheck/text.hpp"

namespace msacheck {

std::string_view to_string(AttributionMethod m) {
  return m == AttributionMethod::Exact ? "exact" : "kernel";
}

std::optional<AttributionMethod> parse_attribution_method(std::string_view s) {
  if (s == "exact") return AttributionMethod::Exact;
  if (s == "kernel") return AttributionMethod::Kernel;
  return std::nullopt;
}

std::string mask_tokens(const std::vector<std::string>& tokens, const Coalition& keep) {
  if (keep.size() != tokens.size()) throw Error(ErrorKind::LengthMismatch, "coalition size != token count");
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!keep[i]) continue;
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

SentenceGame::SentenceGame(const RelevanceBackend& backend, Criterion criterion,
                           ContextWindow context, std::vector<std::string> tokens, OutputSpace space)
    : backend_(backend),
      criterion_(criterion),
      context_(std::move(context)),
      tokens_(std::move(tokens)),
      space_(space) {
  if (space_ == OutputSpace::Margin && !backend_.has_margin()) {
    throw Error(ErrorKind::InvalidArgument, "backend " + backend_.id() + " has no margin output");
  }
  v_empty_ = evaluate("");
  v_full_ = evaluate(mask_tokens(tokens_, Coalition(tokens_.size(), true)));
}

double SentenceGame::evaluate(std::string_view text) const {
  return space_ == OutputSpace::Margin ? backend_.margin(criterion_, text, context_)
                                       : backend_.probability(criterion_, text, context_);
}

double SentenceGame::value(const Coalition& s) const {
  if (s.size() != tokens_.size()) throw Error(ErrorKind::LengthMismatch, "coalition size != token count");
  const auto kept = std::count(s.begin(), s.end(), true);
  if (kept == 0) return v_empty_;
  if (static_cast<std::size_t>(kept) == s.size()) return v_full_;
  return evaluate(mask_tokens(tokens_, s));
}

TokenAttribution explain_prediction(const RelevanceBackend& backend, std::string_view sentence,
                                    const ContextWindow& context, Criterion criterion,
                                    const ExplainOptions& options) {
  std::vector<std::string> tokens;
  for (auto w : text::split_words(sentence)) tokens.emplace_back(w);
  SentenceGame game(backend, criterion, context, tokens, options.space);

  const std::size_t m = tokens.size();
  ShapleyValues sv;
  if (m <= options.exact_limit) {
    sv = exact_shapley(game, options.exact_limit, options.execution);
  } else {
    sv = kernel_shap(game, std::max(options.kernel_budget, 2 * m), options.seed, options.execution);
  }

  TokenAttribution out;
  out.tokens = std::move(tokens);
  out.phi = std::move(sv.phi);
  out.base_value = sv.base_value;
  out.full_value = sv.full_value;
  out.method = sv.method;
  out.samples_used = sv.method == AttributionMethod::Kernel ? sv.evaluations : 0;
  return out;
}

}  // namespace msacheck
