#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "msacheck/classify.hpp"
#include "msacheck/corpus.hpp"
#include "msacheck/evidence.hpp"
#include "msacheck/explain.hpp"

namespace msacheck {

enum class Verdict { Accept, OverrideRelevant, OverrideIrrelevant };
enum class Decision { Met, NotMet, Unclear };

std::string_view to_string(Verdict v);
std::string_view to_string(Decision d);
std::optional<Verdict> parse_verdict(std::string_view s);
std::optional<Decision> parse_decision(std::string_view s);

struct ReviewDecision {
  std::string statement_id;
  std::size_t sentence_index = 0;
  Criterion criterion = Criterion::Approval;
  Verdict verdict = Verdict::Accept;
  std::string reviewer_id;
  std::string timestamp;
  std::uint64_t revision = 0;  // assigned by the store
  // Optimistic check: the cell's current revision must equal this.
  std::optional<std::uint64_t> expected_revision;
  bool operator==(const ReviewDecision&) const = default;
};

struct ComplianceDetermination {
  std::string statement_id;
  Criterion criterion = Criterion::Approval;
  Decision decision = Decision::Unclear;
  std::vector<std::size_t> cited_sentences;
  std::string reviewer_id;
  std::string timestamp;
  std::uint64_t revision = 0;  // per (statement, criterion), assigned by the store
  std::optional<std::uint64_t> expected_revision;
  bool operator==(const ComplianceDetermination&) const = default;
};

struct AuditEntry {
  std::uint64_t sequence = 0;  // 1-based position in the log
  std::variant<ReviewDecision, ComplianceDetermination> record;
  bool operator==(const AuditEntry&) const = default;
};

struct CellKey {
  Criterion criterion = Criterion::Approval;
  std::size_t sentence_index = 0;
  auto operator<=>(const CellKey&) const = default;
};

// A statement with everything derived from it.
struct StatementRecord {
  Statement statement;
  std::optional<PredictionMatrix> predictions;
  std::map<CellKey, TokenAttribution> attributions;
  std::map<CellKey, EvidenceStatus> evidence;
};

using RelevanceMatrix = std::array<std::vector<bool>, kCriterionCount>;

// Latest review per cell overrides the model flag; Accept keeps it.
RelevanceMatrix apply_reviews(RelevanceMatrix model, const std::vector<ReviewDecision>& reviews);
RelevanceMatrix model_relevance(const StatementRecord& record);

// In-memory store: many readers, one writer. Ingested text is immutable and
// the review/determination log is append-only.
class Store {
 public:
  Store() = default;
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // Idempotent for identical content; VersionConflict otherwise.
  void put_statement(const Statement& s);
  Statement get_statement(const std::string& id) const;  // NotFound
  StatementRecord get_record(const std::string& id) const;
  bool contains(const std::string& id) const;
  std::vector<std::string> statement_ids() const;  // sorted

  // Derived artifacts are replaced wholesale so that reruns converge.
  void put_predictions(const std::string& id, PredictionMatrix m);
  void put_attribution(const std::string& id, CellKey cell, TokenAttribution a);
  void put_evidence(const std::string& id, EvidenceStatus e);
  void clear_derived(const std::string& id);

  // Returns the assigned revision. UnknownTarget, StaleRevision.
  std::uint64_t append_review(ReviewDecision d);
  // Met needs at least one cited sentence, all relevant after overrides.
  // UnknownTarget, StaleRevision, InvalidDetermination.
  std::uint64_t append_determination(ComplianceDetermination d);

  std::vector<AuditEntry> audit_log() const;
  std::vector<ReviewDecision> reviews_for(const std::string& id) const;
  std::vector<ComplianceDetermination> determinations_for(const std::string& id) const;
  std::uint64_t cell_revision(const std::string& id, CellKey cell) const;

  RelevanceMatrix effective_relevance(const std::string& id) const;  // NotFound

  // Bundle: statements, predictions, attributions, evidence and reviews as
  // JSONL, sorted so equal stores produce equal bytes.
  std::map<std::string, std::string> bundle() const;
  void export_bundle(const std::filesystem::path& dir) const;
  // Loads a bundle into an empty store, replaying the audit log.
  void import_bundle(const std::filesystem::path& dir);

 private:
  std::uint64_t append_review_locked(ReviewDecision d);
  std::uint64_t append_determination_locked(ComplianceDetermination d);
  const StatementRecord& record_locked(const std::string& id) const;
  StatementRecord& record_mut_locked(const std::string& id);
  RelevanceMatrix effective_locked(const std::string& id) const;

  mutable std::shared_mutex mu_;
  std::map<std::string, StatementRecord> records_;
  std::vector<AuditEntry> log_;
  std::map<std::pair<std::string, CellKey>, std::uint64_t> cell_revisions_;
  std::map<std::pair<std::string, Criterion>, std::uint64_t> determination_revisions_;
};

inline constexpr std::array<const char*, 5> kBundleFiles = {
    "statements.jsonl", "predictions.jsonl", "attributions.jsonl", "evidence.jsonl", "reviews.jsonl"};

}  // namespace msacheck
