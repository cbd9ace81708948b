#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msacheck/classify.hpp"
#include "msacheck/criteria.hpp"

namespace msacheck {

enum class EvidenceKind { Implemented, FutureCommitment, NegativeEvidence };

std::string_view to_string(EvidenceKind k);
std::optional<EvidenceKind> parse_evidence_kind(std::string_view s);

inline constexpr double kDefaultNegativeThreshold = 0.35;

// Word lists behind the native detectors. Tokens are normalized; phrases are
// token sequences.
struct CueLexicon {
  std::vector<std::vector<std::string>> future_cues;
  std::vector<std::vector<std::string>> temporal_cues;
  std::vector<std::string> past_anchors;
  std::vector<std::string> non_verbs;
  std::vector<std::vector<std::string>> negation_cues;
  std::vector<std::vector<std::string>> clause_wide_cues;
  std::size_t negation_window = 6;
  // Trailing '*' marks a prefix match.
  std::array<std::vector<std::string>, kCriterionCount> keywords;

  static CueLexicon parse(std::string_view future_txt, std::string_view negation_txt,
                          std::string_view keywords_tsv);  // throws ConfigError
  static CueLexicon load(const std::filesystem::path& cues_dir);
  // The lexicon shipped under data/cues, compiled in.
  static const CueLexicon& defaults();

  bool operator==(const CueLexicon&) const = default;
};

struct FutureDetection {
  bool fired = false;
  std::string cue;
};

enum class NegativeSource { Native, Nli };

struct NegativeDetection {
  bool fired = false;
  double score = 0.0;   // deny probability (NLI) or 0/1 (native)
  std::string cue;      // native only
  NegativeSource source = NegativeSource::Native;
  bool fallback_used = false;
  std::string fallback_reason;
};

FutureDetection detect_future(std::string_view sentence, const CueLexicon& lex = CueLexicon::defaults());
NegativeDetection detect_negative_native(std::string_view sentence, Criterion c,
                                         const CueLexicon& lex = CueLexicon::defaults());

// Closed threshold: score >= tau fires.
inline bool negative_fires(double deny_score, double tau) { return deny_score >= tau; }

struct HypothesisPair {
  std::string deny;
  std::string acknowledge;
  bool operator==(const HypothesisPair&) const = default;
};

struct NliBackendConfig {
  std::string endpoint;
  std::array<HypothesisPair, kCriterionCount> hypotheses;
  double tau_neg = kDefaultNegativeThreshold;
  int timeout_ms = 10000;
  std::size_t max_in_flight = 4;
  int retries = 2;

  void validate() const;  // throws ConfigError
  // Hypotheses from a criterion<TAB>deny<TAB>acknowledge file.
  static std::array<HypothesisPair, kCriterionCount> load_hypotheses(const std::filesystem::path& tsv);
  static std::array<HypothesisPair, kCriterionCount> default_hypotheses();
};

class HttpJsonClient;

// Two-hypothesis NLI scorer: request {premise, hypotheses: [deny, ack]},
// response {scores: [deny, ack]}.
class NliClient {
 public:
  explicit NliClient(NliBackendConfig config);
  ~NliClient();

  // Deny-hypothesis probability; throws BackendUnavailable or MalformedReply.
  double deny_score(std::string_view premise, Criterion c) const;
  const NliBackendConfig& config() const { return config_; }

 private:
  NliBackendConfig config_;
  std::unique_ptr<HttpJsonClient> client_;
};

struct EvidenceStatus {
  std::size_t sentence_index = 0;
  Criterion criterion = Criterion::Approval;
  EvidenceKind status = EvidenceKind::Implemented;
  FutureDetection future;
  NegativeDetection negative;
  // Set when more than one detector fired and precedence decided.
  bool conflict = false;
};

class EvidenceTracker {
 public:
  explicit EvidenceTracker(CueLexicon lexicon = CueLexicon::defaults(),
                           std::shared_ptr<const NliClient> nli = nullptr);

  FutureDetection detect_future(std::string_view sentence) const;
  // With an NLI client, a transport or reply failure falls back to the native
  // detector and is recorded in the result rather than thrown.
  NegativeDetection detect_negative(std::string_view sentence, Criterion c) const;

  // Negative > Future > Implemented. Throws NotRelevant for an irrelevant hit.
  EvidenceStatus evidence_status(const Sentence& sentence, Criterion c,
                                 const RelevancePrediction& relevance) const;

  const CueLexicon& lexicon() const { return lexicon_; }

 private:
  CueLexicon lexicon_;
  std::shared_ptr<const NliClient> nli_;
};

}  // namespace msacheck
