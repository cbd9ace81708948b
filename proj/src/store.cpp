#include "msacheck/store.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "msacheck/error.hpp"
#include "msacheck/serialization.hpp"

namespace msacheck {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "Accept";
    case Verdict::OverrideRelevant: return "OverrideRelevant";
    case Verdict::OverrideIrrelevant: return "OverrideIrrelevant";
  }
  return "?";
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Met: return "Met";
    case Decision::NotMet: return "NotMet";
    case Decision::Unclear: return "Unclear";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  for (auto v : {Verdict::Accept, Verdict::OverrideRelevant, Verdict::OverrideIrrelevant}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<Decision> parse_decision(std::string_view s) {
  for (auto d : {Decision::Met, Decision::NotMet, Decision::Unclear}) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

RelevanceMatrix model_relevance(const StatementRecord& r) {
  const std::size_t n = r.statement.sentences.size();
  RelevanceMatrix m;
  for (auto c : kCriteria) {
    auto& row = m[index_of(c)];
    row.assign(n, false);
    if (!r.predictions) continue;
    for (std::size_t i = 0; i < n && i < r.predictions->sentence_count(); ++i) {
      const auto& cell = r.predictions->at(c, i);
      row[i] = cell.ok() && cell.prediction->relevant;
    }
  }
  return m;
}

RelevanceMatrix apply_reviews(RelevanceMatrix model, const std::vector<ReviewDecision>& reviews) {
  // Reviews arrive in log order, so the last one per cell wins; Accept
  // restores the model's own flag.
  RelevanceMatrix m = model;
  for (const auto& r : reviews) {
    auto& row = m[index_of(r.criterion)];
    if (r.sentence_index >= row.size()) continue;
    switch (r.verdict) {
      case Verdict::Accept: row[r.sentence_index] = model[index_of(r.criterion)][r.sentence_index]; break;
      case Verdict::OverrideRelevant: row[r.sentence_index] = true; break;
      case Verdict::OverrideIrrelevant: row[r.sentence_index] = false; break;
    }
  }
  return m;
}

void Store::put_statement(const Statement& s) {
  std::unique_lock lock(mu_);
  auto it = records_.find(s.id);
  if (it != records_.end()) {
    if (it->second.statement == s) return;
    throw Error(ErrorKind::VersionConflict, "statement " + s.id + " already stored with different content");
  }
  records_.emplace(s.id, StatementRecord{s, std::nullopt, {}, {}});
}

const StatementRecord& Store::record_locked(const std::string& id) const {
  auto it = records_.find(id);
  if (it == records_.end()) throw Error(ErrorKind::NotFound, "no statement " + id);
  return it->second;
}

StatementRecord& Store::record_mut_locked(const std::string& id) {
  auto it = records_.find(id);
  if (it == records_.end()) throw Error(ErrorKind::NotFound, "no statement " + id);
  return it->second;
}

Statement Store::get_statement(const std::string& id) const {
  std::shared_lock lock(mu_);
  return record_locked(id).statement;
}

StatementRecord Store::get_record(const std::string& id) const {
  std::shared_lock lock(mu_);
  return record_locked(id);
}

bool Store::contains(const std::string& id) const {
  std::shared_lock lock(mu_);
  return records_.count(id) > 0;
}

std::vector<std::string> Store::statement_ids() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : records_) ids.push_back(id);
  return ids;
}

void Store::put_predictions(const std::string& id, PredictionMatrix m) {
  std::unique_lock lock(mu_);
  auto& r = record_mut_locked(id);
  if (m.sentence_count() != r.statement.sentences.size()) {
    throw Error(ErrorKind::LengthMismatch, "prediction matrix does not match statement " + id);
  }
  r.predictions = std::move(m);
}

void Store::put_attribution(const std::string& id, CellKey cell, TokenAttribution a) {
  std::unique_lock lock(mu_);
  auto& r = record_mut_locked(id);
  if (cell.sentence_index >= r.statement.sentences.size()) {
    throw Error(ErrorKind::UnknownTarget, "no sentence " + std::to_string(cell.sentence_index) + " in " + id);
  }
  r.attributions[cell] = std::move(a);
}

void Store::put_evidence(const std::string& id, EvidenceStatus e) {
  std::unique_lock lock(mu_);
  auto& r = record_mut_locked(id);
  if (e.sentence_index >= r.statement.sentences.size()) {
    throw Error(ErrorKind::UnknownTarget, "no sentence " + std::to_string(e.sentence_index) + " in " + id);
  }
  r.evidence[CellKey{e.criterion, e.sentence_index}] = std::move(e);
}

void Store::clear_derived(const std::string& id) {
  std::unique_lock lock(mu_);
  auto& r = record_mut_locked(id);
  r.predictions.reset();
  r.attributions.clear();
  r.evidence.clear();
}

std::uint64_t Store::append_review(ReviewDecision d) {
  std::unique_lock lock(mu_);
  return append_review_locked(std::move(d));
}

std::uint64_t Store::append_review_locked(ReviewDecision d) {
  auto it = records_.find(d.statement_id);
  if (it == records_.end()) throw Error(ErrorKind::UnknownTarget, "no statement " + d.statement_id);
  if (d.sentence_index >= it->second.statement.sentences.size()) {
    throw Error(ErrorKind::UnknownTarget,
                "no sentence " + std::to_string(d.sentence_index) + " in " + d.statement_id);
  }
  auto& rev = cell_revisions_[{d.statement_id, CellKey{d.criterion, d.sentence_index}}];
  if (d.expected_revision && *d.expected_revision != rev) {
    throw Error(ErrorKind::StaleRevision, "cell is at revision " + std::to_string(rev) + ", expected " +
                                              std::to_string(*d.expected_revision));
  }
  d.revision = ++rev;
  log_.push_back(AuditEntry{log_.size() + 1, std::move(d)});
  return rev;
}

std::uint64_t Store::append_determination(ComplianceDetermination d) {
  std::unique_lock lock(mu_);
  return append_determination_locked(std::move(d));
}

std::uint64_t Store::append_determination_locked(ComplianceDetermination d) {
  auto it = records_.find(d.statement_id);
  if (it == records_.end()) throw Error(ErrorKind::UnknownTarget, "no statement " + d.statement_id);
  const std::size_t n = it->second.statement.sentences.size();
  for (auto i : d.cited_sentences) {
    if (i >= n) throw Error(ErrorKind::UnknownTarget, "cited sentence " + std::to_string(i) + " does not exist");
  }
  if (d.decision == Decision::Met) {
    if (d.cited_sentences.empty()) {
      throw Error(ErrorKind::InvalidDetermination, "a Met determination must cite at least one sentence");
    }
    const auto eff = effective_locked(d.statement_id);
    for (auto i : d.cited_sentences) {
      if (!eff[index_of(d.criterion)][i]) {
        throw Error(ErrorKind::InvalidDetermination,
                    "cited sentence " + std::to_string(i) + " is not relevant for " +
                        std::string(to_string(d.criterion)));
      }
    }
  }
  auto& rev = determination_revisions_[{d.statement_id, d.criterion}];
  if (d.expected_revision && *d.expected_revision != rev) {
    throw Error(ErrorKind::StaleRevision, "determination is at revision " + std::to_string(rev) +
                                              ", expected " + std::to_string(*d.expected_revision));
  }
  d.revision = ++rev;
  log_.push_back(AuditEntry{log_.size() + 1, std::move(d)});
  return rev;
}

std::vector<AuditEntry> Store::audit_log() const {
  std::shared_lock lock(mu_);
  return log_;
}

std::vector<ReviewDecision> Store::reviews_for(const std::string& id) const {
  std::shared_lock lock(mu_);
  std::vector<ReviewDecision> out;
  for (const auto& e : log_) {
    if (auto r = std::get_if<ReviewDecision>(&e.record); r && r->statement_id == id) out.push_back(*r);
  }
  return out;
}

std::vector<ComplianceDetermination> Store::determinations_for(const std::string& id) const {
  std::shared_lock lock(mu_);
  std::vector<ComplianceDetermination> out;
  for (const auto& e : log_) {
    if (auto d = std::get_if<ComplianceDetermination>(&e.record); d && d->statement_id == id) out.push_back(*d);
  }
  return out;
}

std::uint64_t Store::cell_revision(const std::string& id, CellKey cell) const {
  std::shared_lock lock(mu_);
  auto it = cell_revisions_.find({id, cell});
  return it == cell_revisions_.end() ? 0 : it->second;
}

RelevanceMatrix Store::effective_locked(const std::string& id) const {
  const auto& rec = record_locked(id);
  std::vector<ReviewDecision> reviews;
  for (const auto& e : log_) {
    if (auto r = std::get_if<ReviewDecision>(&e.record); r && r->statement_id == id) reviews.push_back(*r);
  }
  return apply_reviews(model_relevance(rec), reviews);
}

RelevanceMatrix Store::effective_relevance(const std::string& id) const {
  std::shared_lock lock(mu_);
  return effective_locked(id);
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + p.string());
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> Store::bundle() const {
  std::shared_lock lock(mu_);
  std::ostringstream st, pr, at, ev, rv;
  for (const auto& [id, r] : records_) {
    st << json(r.statement).dump() << '\n';
    if (r.predictions) {
      for (auto c : kCriteria) {
        for (std::size_t i = 0; i < r.predictions->sentence_count(); ++i) {
          pr << prediction_record(id, c, i, r.predictions->at(c, i)).dump() << '\n';
        }
      }
    }
    for (const auto& [k, a] : r.attributions) at << attribution_record(id, k, a).dump() << '\n';
    for (const auto& [k, e] : r.evidence) ev << evidence_record(id, e).dump() << '\n';
  }
  for (const auto& e : log_) rv << audit_record(e).dump() << '\n';
  return {{"statements.jsonl", st.str()},
          {"predictions.jsonl", pr.str()},
          {"attributions.jsonl", at.str()},
          {"evidence.jsonl", ev.str()},
          {"reviews.jsonl", rv.str()}};
}

void Store::export_bundle(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [name, body] : bundle()) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::NotFound, "cannot write " + (dir / name).string());
    out << body;
  }
}

void Store::import_bundle(const std::filesystem::path& dir) {
  std::unique_lock lock(mu_);
  if (!records_.empty() || !log_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "bundles import into an empty store only");
  }
  parse_guard([&] {
    for (const auto& line : read_lines(dir / "statements.jsonl")) {
      auto s = json::parse(line).get<Statement>();
      records_.emplace(s.id, StatementRecord{s, std::nullopt, {}, {}});
    }
    auto rec = [&](const json& j) -> StatementRecord& {
      auto it = records_.find(j.at("statement_id").get<std::string>());
      if (it == records_.end()) throw Error(ErrorKind::MalformedInput, "record for unknown statement: " + j.dump());
      return it->second;
    };
    for (const auto& line : read_lines(dir / "predictions.jsonl")) {
      auto j = json::parse(line);
      auto& r = rec(j);
      if (!r.predictions) r.predictions.emplace(r.statement.sentences.size());
      const auto c = criterion_from_string(j.at("criterion").get<std::string>());
      auto& cell = r.predictions->at(c, j.at("sentence_index").get<std::size_t>());
      if (j.contains("error")) {
        cell.error = parse_error_kind(j.at("error").get<std::string>());
        if (!cell.error) throw Error(ErrorKind::MalformedInput, "unknown error kind in " + line);
        cell.message = j.value("message", std::string());
      } else {
        cell.prediction = j.get<RelevancePrediction>();
      }
    }
    for (const auto& line : read_lines(dir / "attributions.jsonl")) {
      auto j = json::parse(line);
      CellKey k{criterion_from_string(j.at("criterion").get<std::string>()), j.at("sentence_index").get<std::size_t>()};
      rec(j).attributions[k] = j.get<TokenAttribution>();
    }
    for (const auto& line : read_lines(dir / "evidence.jsonl")) {
      auto j = json::parse(line);
      auto e = j.get<EvidenceStatus>();
      rec(j).evidence[CellKey{e.criterion, e.sentence_index}] = e;
    }
    for (const auto& line : read_lines(dir / "reviews.jsonl")) {
      auto j = json::parse(line);
      const auto kind = j.at("kind").get<std::string>();
      std::uint64_t recorded = 0, assigned = 0;
      if (kind == "review") {
        auto d = j.get<ReviewDecision>();
        recorded = d.revision;
        assigned = append_review_locked(d);
      } else if (kind == "determination") {
        auto d = j.get<ComplianceDetermination>();
        recorded = d.revision;
        assigned = append_determination_locked(d);
      } else {
        throw Error(ErrorKind::MalformedInput, "unknown audit record kind " + kind);
      }
      if (recorded != assigned) throw Error(ErrorKind::MalformedInput, "audit log revisions out of order");
    }
  });
}

}  // namespace msacheck
