#include "msacheck/serialization.hpp"

#include "msacheck/error.hpp"

namespace msacheck {

namespace {

template <class T>
T require(const std::optional<T>& v, const json& j, const char* what) {
  if (!v) throw Error(ErrorKind::MalformedInput, std::string("bad ") + what + ": " + j.dump());
  return *v;
}

Criterion criterion_field(const json& j) {
  const auto& s = j.at("criterion").get_ref<const std::string&>();
  return require(parse_criterion(s), j.at("criterion"), "criterion");
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

void to_json(json& j, const StatementMetadata& m) {
  j = json{{"jurisdiction", to_string(m.jurisdiction)},
           {"sector", m.sector ? json(to_string(*m.sector)) : json(nullptr)},
           {"turnover_band", m.turnover_band ? json(to_string(*m.turnover_band)) : json(nullptr)},
           {"publication_year", optional_json(m.publication_year)},
           {"company_id", m.company_id}};
}

void from_json(const json& j, StatementMetadata& m) {
  m = {};
  m.jurisdiction = require(parse_jurisdiction(j.at("jurisdiction").get<std::string>()), j, "jurisdiction");
  if (auto it = j.find("sector"); it != j.end() && !it->is_null()) {
    m.sector = require(parse_sector(it->get<std::string>()), *it, "sector");
  }
  if (auto it = j.find("turnover_band"); it != j.end() && !it->is_null()) {
    m.turnover_band = require(parse_turnover_band(it->get<std::string>()), *it, "turnover_band");
  }
  if (auto it = j.find("publication_year"); it != j.end() && !it->is_null()) {
    m.publication_year = it->get<int>();
  }
  if (auto it = j.find("company_id"); it != j.end()) m.company_id = it->get<std::string>();
}

void to_json(json& j, const Sentence& s) {
  j = json{{"index", s.index},
           {"span", {s.span.start, s.span.end}},
           {"text", s.text},
           {"word_count", s.word_count}};
}

void from_json(const json& j, Sentence& s) {
  s.index = j.at("index").get<std::size_t>();
  const auto& span = j.at("span");
  if (!span.is_array() || span.size() != 2) throw Error(ErrorKind::MalformedInput, "span must be [start, end]");
  s.span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
  s.text = j.at("text").get<std::string>();
  s.word_count = j.at("word_count").get<std::size_t>();
}

void to_json(json& j, const Statement& s) {
  j = json{{"id", s.id}, {"raw_text", s.raw_text}, {"sentences", s.sentences}, {"metadata", s.metadata}};
}

void from_json(const json& j, Statement& s) {
  s.id = j.at("id").get<std::string>();
  s.raw_text = j.at("raw_text").get<std::string>();
  s.sentences = j.at("sentences").get<std::vector<Sentence>>();
  s.metadata = j.at("metadata").get<StatementMetadata>();
  for (const auto& sent : s.sentences) {
    if (sent.span.start > sent.span.end || sent.span.end > s.raw_text.size() ||
        s.raw_text.compare(sent.span.start, sent.span.end - sent.span.start, sent.text) != 0) {
      throw Error(ErrorKind::MalformedInput, "sentence span does not match raw_text in " + s.id);
    }
  }
}

void to_json(json& j, const RelevancePrediction& p) {
  j = json{{"sentence_index", p.sentence_index},
           {"criterion", to_string(p.criterion)},
           {"probability", p.probability},
           {"relevant", p.relevant},
           {"threshold", p.threshold},
           {"backend_id", p.backend_id}};
}

void from_json(const json& j, RelevancePrediction& p) {
  p.sentence_index = j.at("sentence_index").get<std::size_t>();
  p.criterion = criterion_field(j);
  p.probability = j.at("probability").get<double>();
  p.relevant = j.at("relevant").get<bool>();
  p.threshold = j.at("threshold").get<double>();
  p.backend_id = j.at("backend_id").get<std::string>();
}

void to_json(json& j, const TokenAttribution& a) {
  j = json{{"tokens", a.tokens},
           {"phi", a.phi},
           {"base", a.base_value},
           {"full", a.full_value},
           {"method", to_string(a.method)},
           {"samples_used", a.samples_used}};
}

void from_json(const json& j, TokenAttribution& a) {
  a.tokens = j.at("tokens").get<std::vector<std::string>>();
  a.phi = j.at("phi").get<std::vector<double>>();
  if (a.tokens.size() != a.phi.size()) throw Error(ErrorKind::MalformedInput, "tokens/phi length mismatch");
  a.base_value = j.at("base").get<double>();
  a.full_value = j.value("full", 0.0);
  a.method = require(parse_attribution_method(j.at("method").get<std::string>()), j, "method");
  a.samples_used = j.value("samples_used", std::size_t{0});
}

void to_json(json& j, const EvidenceStatus& e) {
  j = json{{"sentence_index", e.sentence_index},
           {"criterion", to_string(e.criterion)},
           {"status", to_string(e.status)},
           {"future", {{"fired", e.future.fired}, {"cue", e.future.cue}}},
           {"negative",
            {{"fired", e.negative.fired},
             {"score", e.negative.score},
             {"cue", e.negative.cue},
             {"source", e.negative.source == NegativeSource::Nli ? "nli" : "native"},
             {"fallback_used", e.negative.fallback_used},
             {"fallback_reason", e.negative.fallback_reason}}},
           {"conflict", e.conflict}};
}

void from_json(const json& j, EvidenceStatus& e) {
  e.sentence_index = j.at("sentence_index").get<std::size_t>();
  e.criterion = criterion_field(j);
  e.status = require(parse_evidence_kind(j.at("status").get<std::string>()), j, "status");
  const auto& f = j.at("future");
  e.future.fired = f.at("fired").get<bool>();
  e.future.cue = f.at("cue").get<std::string>();
  const auto& n = j.at("negative");
  e.negative.fired = n.at("fired").get<bool>();
  e.negative.score = n.at("score").get<double>();
  e.negative.cue = n.at("cue").get<std::string>();
  const auto src = n.at("source").get<std::string>();
  if (src != "nli" && src != "native") throw Error(ErrorKind::MalformedInput, "bad negative source " + src);
  e.negative.source = src == "nli" ? NegativeSource::Nli : NegativeSource::Native;
  e.negative.fallback_used = n.at("fallback_used").get<bool>();
  e.negative.fallback_reason = n.at("fallback_reason").get<std::string>();
  e.conflict = j.at("conflict").get<bool>();
}

void to_json(json& j, const ReviewDecision& d) {
  j = json{{"statement_id", d.statement_id},
           {"sentence_index", d.sentence_index},
           {"criterion", to_string(d.criterion)},
           {"verdict", to_string(d.verdict)},
           {"reviewer_id", d.reviewer_id},
           {"timestamp", d.timestamp},
           {"revision", d.revision}};
  if (d.expected_revision) j["expected_revision"] = *d.expected_revision;
}

void from_json(const json& j, ReviewDecision& d) {
  d = {};
  d.statement_id = j.at("statement_id").get<std::string>();
  d.sentence_index = j.at("sentence_index").get<std::size_t>();
  d.criterion = criterion_field(j);
  d.verdict = require(parse_verdict(j.at("verdict").get<std::string>()), j, "verdict");
  d.reviewer_id = j.value("reviewer_id", std::string());
  d.timestamp = j.value("timestamp", std::string());
  d.revision = j.value("revision", std::uint64_t{0});
  if (auto it = j.find("expected_revision"); it != j.end() && !it->is_null()) {
    d.expected_revision = it->get<std::uint64_t>();
  }
}

void to_json(json& j, const ComplianceDetermination& d) {
  j = json{{"statement_id", d.statement_id},
           {"criterion", to_string(d.criterion)},
           {"decision", to_string(d.decision)},
           {"cited_sentences", d.cited_sentences},
           {"reviewer_id", d.reviewer_id},
           {"timestamp", d.timestamp},
           {"revision", d.revision}};
  if (d.expected_revision) j["expected_revision"] = *d.expected_revision;
}

void from_json(const json& j, ComplianceDetermination& d) {
  d = {};
  d.statement_id = j.at("statement_id").get<std::string>();
  d.criterion = criterion_field(j);
  d.decision = require(parse_decision(j.at("decision").get<std::string>()), j, "decision");
  d.cited_sentences = j.value("cited_sentences", std::vector<std::size_t>{});
  d.reviewer_id = j.value("reviewer_id", std::string());
  d.timestamp = j.value("timestamp", std::string());
  d.revision = j.value("revision", std::uint64_t{0});
  if (auto it = j.find("expected_revision"); it != j.end() && !it->is_null()) {
    d.expected_revision = it->get<std::uint64_t>();
  }
}

json prediction_record(const std::string& id, Criterion c, std::size_t i, const PredictionCell& cell) {
  json j;
  if (cell.ok()) {
    j = json(*cell.prediction);
  } else {
    j = json{{"sentence_index", i}, {"criterion", to_string(c)}};
    j["error"] = cell.error ? to_string(*cell.error) : "Unknown";
    j["message"] = cell.message;
  }
  j["statement_id"] = id;
  return j;
}

json attribution_record(const std::string& id, CellKey k, const TokenAttribution& a) {
  json j = json(a);
  j["statement_id"] = id;
  j["sentence_index"] = k.sentence_index;
  j["criterion"] = to_string(k.criterion);
  return j;
}

json evidence_record(const std::string& id, const EvidenceStatus& e) {
  json j = json(e);
  j["statement_id"] = id;
  return j;
}

json audit_record(const AuditEntry& e) {
  json j;
  if (auto r = std::get_if<ReviewDecision>(&e.record)) {
    j = json(*r);
    j["kind"] = "review";
  } else {
    j = json(std::get<ComplianceDetermination>(e.record));
    j["kind"] = "determination";
  }
  j.erase("expected_revision");
  j["sequence"] = e.sequence;
  return j;
}

json relevance_json(const RelevanceMatrix& m) {
  json j = json::object();
  for (auto c : kCriteria) j[std::string(to_string(c))] = m[index_of(c)];
  return j;
}

void to_json(json& j, const CalibrationReport& r) {
  json curve = json::array();
  for (const auto& b : r.curve) {
    curve.push_back({{"lower", b.lower},
                     {"upper", b.upper},
                     {"mean_predicted", b.mean_predicted},
                     {"fraction_positive", b.fraction_positive},
                     {"count", b.count}});
  }
  j = json{{"curve", curve}, {"ece", r.ece}, {"samples", r.samples}};
}

void to_json(json& j, const TrendReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json fr = json::object(), cnt = json::object();
    for (auto c : kCriteria) {
      fr[std::string(to_string(c))] = row.fraction[index_of(c)];
      cnt[std::string(to_string(c))] = row.compliant[index_of(c)];
    }
    rows.push_back({{"value", row.value}, {"statements", row.statements}, {"compliant", cnt}, {"fraction", fr}});
  }
  j = json{{"facet", to_string(r.facet)}, {"rows", rows}, {"missing_metadata", r.missing_metadata}};
}

}  // namespace msacheck
