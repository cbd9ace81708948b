#include "msacheck/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "msacheck/error.hpp"
#include "msacheck/paths.hpp"
#include "msacheck/text.hpp"
#include "msacheck/transport.hpp"

namespace msacheck {

namespace detail {
// Generated from data/cues at configure time.
extern const char* const kFutureCuesText;
extern const char* const kNegationCuesText;
extern const char* const kKeywordsText;
extern const char* const kHypothesesText;
}  // namespace detail

std::string_view to_string(EvidenceKind k) {
  switch (k) {
    case EvidenceKind::Implemented: return "Implemented";
    case EvidenceKind::FutureCommitment: return "FutureCommitment";
    case EvidenceKind::NegativeEvidence: return "NegativeEvidence";
  }
  return "?";
}

std::optional<EvidenceKind> parse_evidence_kind(std::string_view s) {
  for (auto k : {EvidenceKind::Implemented, EvidenceKind::FutureCommitment, EvidenceKind::NegativeEvidence}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

namespace {

using Tokens = std::vector<std::string>;

std::string norm(std::string_view w) {
  std::string t = text::normalize_token(w);
  // Typographic apostrophe -> ASCII, so "didn’t" matches "didn't".
  for (std::size_t p = t.find("\xE2\x80\x99"); p != std::string::npos; p = t.find("\xE2\x80\x99", p)) {
    t.replace(p, 3, "'");
  }
  return t;
}

// Normalized tokens grouped into clauses; a word ending in , ; : . ! ? closes
// its clause.
std::vector<Tokens> clauses(std::string_view sentence) {
  std::vector<Tokens> out(1);
  for (auto w : text::split_words(sentence)) {
    auto t = norm(w);
    if (!t.empty()) out.back().push_back(std::move(t));
    const char last = w.back();
    if ((last == ',' || last == ';' || last == ':' || last == '.' || last == '!' || last == '?') &&
        !out.back().empty()) {
      out.emplace_back();
    }
  }
  if (out.back().empty()) out.pop_back();
  return out;
}

bool matches_at(const Tokens& toks, std::size_t k, const Tokens& phrase) {
  if (phrase.empty() || k + phrase.size() > toks.size()) return false;
  return std::equal(phrase.begin(), phrase.end(), toks.begin() + static_cast<long>(k));
}

std::string joined(const Tokens& phrase) {
  std::string s;
  for (const auto& t : phrase) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

bool is_alpha_word(const std::string& t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

bool keyword_hit(const std::string& tok, const std::vector<std::string>& kws) {
  for (const auto& k : kws) {
    if (!k.empty() && k.back() == '*') {
      if (tok.compare(0, k.size() - 1, k, 0, k.size() - 1) == 0 && tok.size() >= k.size() - 1) return true;
    } else if (tok == k) {
      return true;
    }
  }
  return false;
}

using Sections = std::vector<std::pair<std::string, std::vector<std::string>>>;

Sections read_sections(std::string_view body, std::string_view what) {
  Sections out;
  std::istringstream in{std::string(body)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = std::string(text::trim(line));
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      out.emplace_back(t.substr(1, t.size() - 2), std::vector<std::string>{});
      continue;
    }
    if (out.empty()) throw Error(ErrorKind::ConfigError, std::string(what) + ": entry before any [section]");
    out.back().second.push_back(t);
  }
  return out;
}

std::vector<Tokens> phrases(const std::vector<std::string>& lines) {
  std::vector<Tokens> out;
  for (const auto& l : lines) {
    Tokens p;
    for (auto w : text::split_words(l)) p.push_back(norm(w));
    if (!p.empty()) out.push_back(std::move(p));
  }
  // Longest first so that the longest cue wins at a position.
  std::stable_sort(out.begin(), out.end(), [](const Tokens& a, const Tokens& b) { return a.size() > b.size(); });
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::array<HypothesisPair, kCriterionCount> parse_hypotheses(std::string_view body) {
  std::array<HypothesisPair, kCriterionCount> out;
  std::array<bool, kCriterionCount> seen{};
  std::istringstream in{std::string(body)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, '\t');) f.push_back(cell);
    if (f.size() != 3) throw Error(ErrorKind::ConfigError, "hypotheses: expected 3 fields: " + line);
    auto c = parse_criterion(f[0]);
    if (!c) throw Error(ErrorKind::ConfigError, "hypotheses: unknown criterion " + f[0]);
    out[index_of(*c)] = {f[1], f[2]};
    seen[index_of(*c)] = true;
  }
  for (auto c : kCriteria) {
    if (!seen[index_of(c)]) {
      throw Error(ErrorKind::ConfigError, "hypotheses: missing " + std::string(to_string(c)));
    }
  }
  return out;
}

}  // namespace

CueLexicon CueLexicon::parse(std::string_view future_txt, std::string_view negation_txt,
                             std::string_view keywords_tsv) {
  CueLexicon lex;
  for (auto& [name, lines] : read_sections(future_txt, "future cues")) {
    if (name == "cues") lex.future_cues = phrases(lines);
    else if (name == "temporal") lex.temporal_cues = phrases(lines);
    else if (name == "past_anchors") for (auto& l : lines) lex.past_anchors.push_back(norm(l));
    else if (name == "non_verbs") for (auto& l : lines) lex.non_verbs.push_back(norm(l));
    else throw Error(ErrorKind::ConfigError, "future cues: unknown section [" + name + "]");
  }
  for (auto& [name, lines] : read_sections(negation_txt, "negation cues")) {
    if (name == "cues") {
      lex.negation_cues = phrases(lines);
    } else if (name == "clause_wide") {
      lex.clause_wide_cues = phrases(lines);
    } else if (name == "window") {
      if (lines.size() != 1) throw Error(ErrorKind::ConfigError, "negation cues: [window] takes one value");
      try {
        lex.negation_window = std::stoul(lines.front());
      } catch (const std::exception&) {
        throw Error(ErrorKind::ConfigError, "negation cues: bad window '" + lines.front() + "'");
      }
    } else {
      throw Error(ErrorKind::ConfigError, "negation cues: unknown section [" + name + "]");
    }
  }
  std::istringstream in{std::string(keywords_tsv)};
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorKind::ConfigError, "keywords: expected criterion<TAB>keyword");
    auto c = parse_criterion(line.substr(0, tab));
    if (!c) throw Error(ErrorKind::ConfigError, "keywords: unknown criterion in '" + line + "'");
    auto kw = text::to_lower(text::trim(line.substr(tab + 1)));
    if (!kw.empty()) lex.keywords[index_of(*c)].push_back(kw);
  }
  if (lex.future_cues.empty() || lex.negation_cues.empty()) {
    throw Error(ErrorKind::ConfigError, "cue lexicon is missing future or negation cues");
  }
  return lex;
}

CueLexicon CueLexicon::load(const std::filesystem::path& dir) {
  return parse(slurp(dir / "future.txt"), slurp(dir / "negation.txt"), slurp(dir / "keywords.tsv"));
}

const CueLexicon& CueLexicon::defaults() {
  static const CueLexicon lex =
      parse(detail::kFutureCuesText, detail::kNegationCuesText, detail::kKeywordsText);
  return lex;
}

FutureDetection detect_future(std::string_view sentence, const CueLexicon& lex) {
  for (const auto& toks : clauses(sentence)) {
    for (std::size_t k = 0; k < toks.size(); ++k) {
      const bool anchored = (k >= 1 && contains(lex.past_anchors, toks[k - 1])) ||
                            (k >= 2 && contains(lex.past_anchors, toks[k - 2]));
      for (const auto& cue : lex.temporal_cues) {
        if (matches_at(toks, k, cue) && !anchored) return {true, joined(cue)};
      }
      for (const auto& cue : lex.future_cues) {
        if (!matches_at(toks, k, cue)) continue;
        const std::size_t next = k + cue.size();
        if (anchored || next >= toks.size()) break;
        if (is_alpha_word(toks[next]) && !contains(lex.non_verbs, toks[next])) return {true, joined(cue)};
        break;
      }
    }
  }
  return {};
}

NegativeDetection detect_negative_native(std::string_view sentence, Criterion c, const CueLexicon& lex) {
  const auto& kws = lex.keywords[index_of(c)];
  NegativeDetection out;
  for (const auto& toks : clauses(sentence)) {
    const bool clause_has_kw =
        std::any_of(toks.begin(), toks.end(), [&](const std::string& t) { return keyword_hit(t, kws); });
    for (std::size_t k = 0; k < toks.size(); ++k) {
      for (const auto& cue : lex.clause_wide_cues) {
        if (matches_at(toks, k, cue) && clause_has_kw) {
          out.fired = true;
          out.score = 1.0;
          out.cue = joined(cue);
          return out;
        }
      }
      for (const auto& cue : lex.negation_cues) {
        if (!matches_at(toks, k, cue)) continue;
        const std::size_t from = k + cue.size();
        const std::size_t to = std::min(toks.size(), from + lex.negation_window);
        for (std::size_t j = from; j < to; ++j) {
          if (keyword_hit(toks[j], kws)) {
            out.fired = true;
            out.score = 1.0;
            out.cue = joined(cue);
            return out;
          }
        }
        break;
      }
    }
  }
  return out;
}

void NliBackendConfig::validate() const {
  HttpEndpoint::parse(endpoint);
  if (!(tau_neg > 0.0 && tau_neg < 1.0)) throw Error(ErrorKind::ConfigError, "tau_neg must lie in (0,1)");
  for (auto c : kCriteria) {
    const auto& h = hypotheses[index_of(c)];
    if (h.deny.empty() || h.acknowledge.empty()) {
      throw Error(ErrorKind::ConfigError, "missing NLI hypotheses for " + std::string(to_string(c)));
    }
  }
  if (timeout_ms <= 0 || max_in_flight == 0 || retries < 0) {
    throw Error(ErrorKind::ConfigError, "bad NLI client limits");
  }
}

std::array<HypothesisPair, kCriterionCount> NliBackendConfig::load_hypotheses(const std::filesystem::path& tsv) {
  return parse_hypotheses(slurp(tsv));
}

std::array<HypothesisPair, kCriterionCount> NliBackendConfig::default_hypotheses() {
  return parse_hypotheses(detail::kHypothesesText);
}

NliClient::NliClient(NliBackendConfig config) : config_(std::move(config)) {
  config_.validate();
  client_ = std::make_unique<HttpJsonClient>(config_.endpoint, config_.timeout_ms, config_.max_in_flight,
                                             config_.retries);
}

NliClient::~NliClient() = default;

double NliClient::deny_score(std::string_view premise, Criterion c) const {
  const auto& h = config_.hypotheses[index_of(c)];
  nlohmann::json req = {{"premise", premise}, {"hypotheses", {h.deny, h.acknowledge}}};
  auto res = client_->post(req);
  auto it = res.is_object() ? res.find("scores") : res.end();
  if (it == res.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
      !(*it)[1].is_number()) {
    throw Error(ErrorKind::MalformedReply, "NLI reply lacks scores: [deny, acknowledge]");
  }
  const double deny = (*it)[0].get<double>();
  const double ack = (*it)[1].get<double>();
  if (!std::isfinite(deny) || !std::isfinite(ack) || deny < 0.0 || ack < 0.0 || deny + ack > 1.0 + 1e-6) {
    throw Error(ErrorKind::MalformedReply, "NLI scores must be non-negative and sum to at most 1");
  }
  return deny;
}

EvidenceTracker::EvidenceTracker(CueLexicon lexicon, std::shared_ptr<const NliClient> nli)
    : lexicon_(std::move(lexicon)), nli_(std::move(nli)) {}

FutureDetection EvidenceTracker::detect_future(std::string_view sentence) const {
  return msacheck::detect_future(sentence, lexicon_);
}

NegativeDetection EvidenceTracker::detect_negative(std::string_view sentence, Criterion c) const {
  if (!nli_) return detect_negative_native(sentence, c, lexicon_);
  try {
    NegativeDetection out;
    out.source = NegativeSource::Nli;
    out.score = nli_->deny_score(sentence, c);
    out.fired = negative_fires(out.score, nli_->config().tau_neg);
    return out;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BackendUnavailable && e.kind() != ErrorKind::MalformedReply) throw;
    auto out = detect_negative_native(sentence, c, lexicon_);
    out.fallback_used = true;
    out.fallback_reason = e.what();
    return out;
  }
}

EvidenceStatus EvidenceTracker::evidence_status(const Sentence& sentence, Criterion c,
                                                const RelevancePrediction& relevance) const {
  if (!relevance.relevant) {
    throw Error(ErrorKind::NotRelevant, "evidence status requested for an irrelevant hit");
  }
  if (relevance.criterion != c || relevance.sentence_index != sentence.index) {
    throw Error(ErrorKind::InvalidArgument, "relevance prediction is for a different cell");
  }
  EvidenceStatus out;
  out.sentence_index = sentence.index;
  out.criterion = c;
  out.negative = detect_negative(sentence.text, c);
  out.future = detect_future(sentence.text);
  out.conflict = out.negative.fired && out.future.fired;
  if (out.negative.fired) out.status = EvidenceKind::NegativeEvidence;
  else if (out.future.fired) out.status = EvidenceKind::FutureCommitment;
  else out.status = EvidenceKind::Implemented;
  return out;
}

}  // namespace msacheck
