#include "msacheck/synthetic.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace msacheck {

namespace {

const std::map<Criterion, std::vector<std::string>>& keyword_table() {
  static const std::map<Criterion, std::vector<std::string>> table = {
      {Criterion::Approval, {"approved", "board", "endorsed", "directors"}},
      {Criterion::Signature, {"signed", "signature", "signatory", "undersigned"}},
      {Criterion::C2_Structure, {"subsidiaries", "headquartered", "ownership", "incorporated"}},
      {Criterion::C2_Operations, {"operate", "stores", "manufacture", "warehouses"}},
      {Criterion::C2_SupplyChains, {"suppliers", "sourcing", "procurement", "vendors"}},
      {Criterion::C3_RiskDescription, {"risk", "forced", "trafficking", "vulnerable"}},
      {Criterion::C4_RiskMitigation, {"audits", "diligence", "training", "policy"}},
      {Criterion::C4_Remediation, {"remediation", "remedy", "reimbursed", "grievances"}},
      {Criterion::C5_Effectiveness, {"effectiveness", "indicators", "monitor", "kpis"}},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& synthetic_keywords(Criterion c) { return keyword_table().at(c); }

const std::vector<std::string>& synthetic_filler() {
  static const std::vector<std::string> words = {
      "we",      "our",     "the",     "company", "group",    "year",    "continue", "across",
      "team",    "people",  "during",  "period",  "with",     "and",     "of",       "in",
      "to",      "a",       "this",    "statement", "report", "global",  "local",    "customers",
      "values",  "culture", "approach", "commitment", "business", "partners", "community", "growth",
      "quality", "service", "staff",   "members", "region",   "sector",  "market",   "products",
      "annual",  "further", "overall", "ongoing", "within",   "relevant", "various", "including"};
  return words;
}

std::vector<LabeledExample> synthetic_corpus(const SyntheticCorpusOptions& o) {
  std::mt19937_64 rng(o.seed);
  const auto& filler = synthetic_filler();
  std::uniform_int_distribution<std::size_t> pick_filler(0, filler.size() - 1);
  std::uniform_int_distribution<std::size_t> len(6, 14);

  auto filler_text = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += filler[pick_filler(rng)];
    }
    return s;
  };
  auto make_context = [&](LabeledExample& ex) {
    if (o.context_words == 0) return;
    ex.context.before_text = filler_text(o.context_words);
    ex.context.after_text = filler_text(o.context_words);
    ex.context.budget = 2 * o.context_words;
  };

  std::vector<LabeledExample> out;
  out.reserve(o.per_criterion * kCriterionCount + o.negatives);
  for (auto c : kCriteria) {
    const auto& kws = synthetic_keywords(c);
    std::uniform_int_distribution<std::size_t> pick_kw(0, kws.size() - 1);
    for (std::size_t k = 0; k < o.per_criterion; ++k) {
      std::vector<std::string> words;
      const std::size_t n = len(rng);
      for (std::size_t i = 0; i < n; ++i) words.push_back(filler[pick_filler(rng)]);
      const std::size_t plants = 1 + (rng() % 2);
      for (std::size_t p = 0; p < plants; ++p) {
        std::uniform_int_distribution<std::size_t> pos(0, words.size());
        words.insert(words.begin() + static_cast<long>(pos(rng)), kws[pick_kw(rng)]);
      }
      LabeledExample ex;
      for (std::size_t i = 0; i < words.size(); ++i) ex.sentence += (i ? " " : "") + words[i];
      ex.sentence += '.';
      ex.labels[index_of(c)] = true;
      make_context(ex);
      out.push_back(std::move(ex));
    }
  }
  for (std::size_t k = 0; k < o.negatives; ++k) {
    LabeledExample ex;
    ex.sentence = filler_text(len(rng)) + ".";
    make_context(ex);
    out.push_back(std::move(ex));
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace msacheck
