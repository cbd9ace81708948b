#pragma once

#include <json.hpp>

#include "msacheck/classify.hpp"
#include "msacheck/corpus.hpp"
#include "msacheck/evidence.hpp"
#include "msacheck/explain.hpp"
#include "msacheck/metrics.hpp"
#include "msacheck/store.hpp"

// JSON forms of the stored and exported types. Readers throw MalformedInput.
namespace msacheck {

using nlohmann::json;

void to_json(json& j, const StatementMetadata& m);
void from_json(const json& j, StatementMetadata& m);
void to_json(json& j, const Sentence& s);
void from_json(const json& j, Sentence& s);
void to_json(json& j, const Statement& s);
void from_json(const json& j, Statement& s);

void to_json(json& j, const RelevancePrediction& p);
void from_json(const json& j, RelevancePrediction& p);

void to_json(json& j, const TokenAttribution& a);
void from_json(const json& j, TokenAttribution& a);

void to_json(json& j, const EvidenceStatus& e);
void from_json(const json& j, EvidenceStatus& e);

void to_json(json& j, const ReviewDecision& d);
void from_json(const json& j, ReviewDecision& d);
void to_json(json& j, const ComplianceDetermination& d);
void from_json(const json& j, ComplianceDetermination& d);

// One line of each bundle file.
json prediction_record(const std::string& statement_id, Criterion c, std::size_t sentence,
                       const PredictionCell& cell);
json attribution_record(const std::string& statement_id, CellKey cell, const TokenAttribution& a);
json evidence_record(const std::string& statement_id, const EvidenceStatus& e);
json audit_record(const AuditEntry& entry);

json relevance_json(const RelevanceMatrix& m);

void to_json(json& j, const CalibrationReport& r);
void to_json(json& j, const TrendReport& r);

// Runs `fn`, converting nlohmann errors into MalformedInput.
template <class F>
auto parse_guard(F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedInput, e.what());
  }
}

}  // namespace msacheck
