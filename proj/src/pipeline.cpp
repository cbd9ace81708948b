#include "msacheck/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "msacheck/error.hpp"
#include "msacheck/remote.hpp"
#include "msacheck/serialization.hpp"
#include "msacheck/text.hpp"

namespace msacheck {

namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Per-cell kernel seed, independent of scheduling order.
std::uint64_t cell_seed(std::uint64_t seed, const std::string& id, Criterion c, std::size_t i) {
  std::string key = id + '\x1f' + std::string(to_string(c)) + '\x1f' + std::to_string(i);
  return text::fnv1a64(key, seed ^ 0xcbf29ce484222325ULL);
}

}  // namespace

void PipelineConfig::validate() const {
  try {
    thresholds.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  if (exact_limit > kExactShapleyLimit * 2) {
    throw Error(ErrorKind::ConfigError, "exact_limit above 24 is impractical");
  }
  if (nli) nli->validate();
}

PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig c) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  try {
    if (auto b = j.find("backend"); b != j.end()) {
      const auto kind = b->value("kind", std::string(to_string(c.backend.kind)));
      if (kind == "native") c.backend.kind = BackendKind::NativeLinear;
      else if (kind == "remote") c.backend.kind = BackendKind::RemoteYesNo;
      else throw Error(ErrorKind::ConfigError, "backend.kind must be native or remote");
      c.backend.model_path = b->value("model_path", c.backend.model_path);
      c.backend.endpoint = b->value("endpoint", c.backend.endpoint);
      c.backend.timeout_ms = b->value("timeout_ms", c.backend.timeout_ms);
      c.backend.max_in_flight = b->value("max_in_flight", c.backend.max_in_flight);
      c.backend.retries = b->value("retries", c.backend.retries);
      if (auto style = b->find("template_style"); style != b->end()) {
        auto s = parse_prompt_style(style->get<std::string>());
        if (!s) throw Error(ErrorKind::ConfigError, "unknown template_style " + style->dump());
        for (auto cr : kCriteria) c.backend.template_ids[cr] = template_id(*s, cr);
      }
      if (auto t = b->find("template_ids"); t != b->end()) {
        for (auto& [k, v] : t->items()) c.backend.template_ids[criterion_from_string(k)] = v.get<std::string>();
      }
    }
    c.context_budget = j.value("context_budget", c.context_budget);
    c.thresholds.fallback = j.value("threshold", c.thresholds.fallback);
    if (auto t = j.find("thresholds"); t != j.end()) {
      for (auto& [k, v] : t->items()) c.thresholds.per_criterion[index_of(criterion_from_string(k))] = v.get<double>();
    }
    c.seed = j.value("seed", c.seed);
    if (auto e = j.find("explain"); e != j.end()) {
      c.exact_limit = e->value("exact_limit", c.exact_limit);
      c.kernel_budget = e->value("kernel_budget", c.kernel_budget);
      c.explain_all_cells = e->value("all_cells", c.explain_all_cells);
    }
    c.workers = j.value("workers", c.workers);
    if (auto n = j.find("nli"); n != j.end() && !n->is_null()) {
      NliBackendConfig nc;
      nc.endpoint = n->at("endpoint").get<std::string>();
      nc.tau_neg = n->value("tau_neg", nc.tau_neg);
      nc.timeout_ms = n->value("timeout_ms", nc.timeout_ms);
      nc.max_in_flight = n->value("max_in_flight", nc.max_in_flight);
      nc.retries = n->value("retries", nc.retries);
      nc.hypotheses = n->contains("hypotheses_file")
                          ? NliBackendConfig::load_hypotheses(n->at("hypotheses_file").get<std::string>())
                          : NliBackendConfig::default_hypotheses();
      c.nli = nc;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    throw Error(ErrorKind::ConfigError, e.what());
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

std::string_view to_string(StageStatus s) {
  switch (s) {
    case StageStatus::Pending: return "pending";
    case StageStatus::Done: return "done";
    case StageStatus::Failed: return "failed";
    case StageStatus::Skipped: return "skipped";
  }
  return "?";
}

std::size_t PipelineRun::failures() const {
  std::size_t n = 0;
  for (const auto& s : statements) n += s.error.empty() ? 0 : 1;
  return n;
}

nlohmann::json to_json(const PipelineRun& r) {
  nlohmann::json stmts = nlohmann::json::array();
  for (const auto& s : r.statements) {
    stmts.push_back({{"statement_id", s.statement_id},
                     {"line", s.line},
                     {"stages",
                      {{"ingest", to_string(s.ingest)},
                       {"classify", to_string(s.classify)},
                       {"explain", to_string(s.explain)},
                       {"evidence", to_string(s.evidence)}}},
                     {"error", s.error},
                     {"failed_cells", s.failed_cells},
                     {"millis", s.millis}});
  }
  return {{"run_id", r.run_id},
          {"backend", {{"id", r.backend_id}, {"kind", to_string(r.backend_kind)}}},
          {"context_budget", r.context_budget},
          {"threshold", r.threshold},
          {"seed", r.seed},
          {"state", r.state == RunState::Running ? "running" : "completed"},
          {"statement_ids", r.statement_ids},
          {"statements", stmts},
          {"failures", r.failures()},
          {"millis", r.millis}};
}

std::string make_run_id(std::string_view digest, const std::string& backend_id, const PipelineConfig& c) {
  std::ostringstream key;
  key << digest << '|' << backend_id << '|' << c.context_budget << '|' << c.thresholds.fallback;
  for (const auto& t : c.thresholds.per_criterion) key << ',' << (t ? *t : -1.0);
  key << '|' << c.seed << '|' << c.exact_limit << '|' << c.kernel_budget << '|' << c.explain_all_cells;
  return "run-" + text::hex64(text::fnv1a64(key.str()));
}

Pipeline::Pipeline(std::shared_ptr<const RelevanceBackend> backend, PipelineConfig config,
                   std::shared_ptr<const EvidenceTracker> tracker)
    : backend_(std::move(backend)), config_(std::move(config)), tracker_(std::move(tracker)) {
  if (!backend_) throw Error(ErrorKind::ConfigError, "pipeline needs a backend");
  config_.validate();
  if (!tracker_) {
    std::shared_ptr<const NliClient> nli;
    if (config_.nli) nli = std::make_shared<const NliClient>(*config_.nli);
    tracker_ = std::make_shared<const EvidenceTracker>(CueLexicon::defaults(), nli);
  }
}

void Pipeline::process(const Statement& st, Store& store, StatementRunStatus& status) const {
  auto matrix = predict_statement(*backend_, st, config_.context_budget, config_.thresholds, Execution::Serial);
  status.failed_cells = matrix.failed_cells();
  status.classify = StageStatus::Done;

  ExplainOptions eo;
  eo.exact_limit = config_.exact_limit;
  eo.kernel_budget = config_.kernel_budget;
  eo.execution = Execution::Serial;

  std::vector<std::pair<CellKey, TokenAttribution>> attributions;
  std::vector<EvidenceStatus> evidence;
  bool explain_failed = false, evidence_failed = false;
  std::string first_error;
  for (std::size_t i = 0; i < st.sentences.size(); ++i) {
    const auto ctx = build_context(st, i, config_.context_budget);
    for (auto c : kCriteria) {
      const auto& cell = matrix.at(c, i);
      if (!cell.ok()) continue;
      const bool relevant = cell.prediction->relevant;
      if (relevant || config_.explain_all_cells) {
        try {
          eo.seed = cell_seed(config_.seed, st.id, c, i);
          attributions.emplace_back(CellKey{c, i}, explain_prediction(*backend_, st.sentences[i].text, ctx, c, eo));
        } catch (const Error& e) {
          explain_failed = true;
          if (first_error.empty()) first_error = e.what();
        }
      }
      if (relevant) {
        try {
          evidence.push_back(tracker_->evidence_status(st.sentences[i], c, *cell.prediction));
        } catch (const Error& e) {
          evidence_failed = true;
          if (first_error.empty()) first_error = e.what();
        }
      }
    }
  }
  status.explain = explain_failed ? StageStatus::Failed : StageStatus::Done;
  status.evidence = evidence_failed ? StageStatus::Failed : StageStatus::Done;
  if (!first_error.empty()) status.error = first_error;

  // Replace the derived artifacts wholesale so a rerun converges.
  store.clear_derived(st.id);
  store.put_predictions(st.id, std::move(matrix));
  for (auto& [k, a] : attributions) store.put_attribution(st.id, k, std::move(a));
  for (auto& e : evidence) store.put_evidence(st.id, std::move(e));
}

PipelineRun Pipeline::start(std::string_view digest) const {
  PipelineRun run;
  run.run_id = make_run_id(digest, backend_->id(), config_);
  run.backend_id = backend_->id();
  run.backend_kind = backend_->kind();
  run.context_budget = config_.context_budget;
  run.threshold = config_.thresholds.fallback;
  run.seed = config_.seed;
  return run;
}

namespace {

int worker_count(std::size_t configured) {
  return configured == 0 ? omp_get_max_threads() : static_cast<int>(configured);
}

}  // namespace

PipelineRun Pipeline::run(const std::vector<std::string>& lines, Store& store) const {
  std::string all;
  for (const auto& l : lines) all += l + '\n';
  PipelineRun run = start(text::hex64(text::fnv1a64(all)));
  const auto t0 = Clock::now();

  run.statements.resize(lines.size());
  std::vector<std::optional<Statement>> parsed(lines.size());
  const long n = static_cast<long>(lines.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count(config_.workers))
  for (long k = 0; k < n; ++k) {
    auto& status = run.statements[k];
    status.line = static_cast<std::size_t>(k) + 1;
    status.statement_id = "line-" + std::to_string(k + 1);
    const auto ts = Clock::now();
    try {
      auto in = parse_statement_input(lines[k]);
      in.metadata.validate();
      auto st = ingest_statement(std::move(in.text), in.metadata, in.id);
      status.statement_id = st.id;
      store.put_statement(st);
      status.ingest = StageStatus::Done;
      process(st, store, status);
      parsed[k] = std::move(st);
    } catch (const std::exception& e) {
      status.error = e.what();
      auto mark = [](StageStatus& s) { if (s == StageStatus::Pending) s = StageStatus::Skipped; };
      if (status.ingest == StageStatus::Pending) status.ingest = StageStatus::Failed;
      else if (status.classify == StageStatus::Pending) status.classify = StageStatus::Failed;
      mark(status.classify);
      mark(status.explain);
      mark(status.evidence);
    }
    status.millis = millis_since(ts);
  }
  for (std::size_t k = 0; k < parsed.size(); ++k) {
    if (parsed[k] && run.statements[k].classify == StageStatus::Done) run.statement_ids.push_back(parsed[k]->id);
  }
  run.millis = millis_since(t0);
  run.state = RunState::Completed;
  return run;
}

PipelineRun Pipeline::run_file(const std::filesystem::path& jsonl, Store& store) const {
  return run(read_jsonl_lines(jsonl), store);
}

PipelineRun Pipeline::run_stored(const std::vector<std::string>& ids, Store& store) const {
  std::string all;
  for (const auto& id : ids) all += store.contains(id) ? id + '\n' : std::string();
  PipelineRun run = start(text::hex64(text::fnv1a64("stored\n" + all)));
  const auto t0 = Clock::now();
  run.statements.resize(ids.size());
  const long n = static_cast<long>(ids.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count(config_.workers))
  for (long k = 0; k < n; ++k) {
    auto& status = run.statements[k];
    status.statement_id = ids[k];
    const auto ts = Clock::now();
    try {
      const auto st = store.get_statement(ids[k]);
      status.ingest = StageStatus::Done;
      process(st, store, status);
    } catch (const std::exception& e) {
      status.error = e.what();
      if (status.ingest == StageStatus::Pending) status.ingest = StageStatus::Failed;
      for (auto* s : {&status.classify, &status.explain, &status.evidence}) {
        if (*s == StageStatus::Pending) *s = StageStatus::Skipped;
      }
    }
    status.millis = millis_since(ts);
  }
  for (const auto& s : run.statements) {
    if (s.classify == StageStatus::Done) run.statement_ids.push_back(s.statement_id);
  }
  run.millis = millis_since(t0);
  run.state = RunState::Completed;
  return run;
}

std::vector<std::string> read_jsonl_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + path.string());
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!text::trim(line).empty()) out.push_back(line);
  }
  return out;
}

std::vector<StatementOutcome> outcomes(const Store& store, const std::vector<std::string>& ids) {
  std::vector<StatementOutcome> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    StatementOutcome o;
    o.statement_id = id;
    o.metadata = store.get_statement(id).metadata;
    o.relevant = store.effective_relevance(id);
    out.push_back(std::move(o));
  }
  return out;
}

nlohmann::json run_report(const Store& store, const std::vector<std::string>& ids, Facet facet) {
  const auto outs = outcomes(store, ids);
  nlohmann::json compliance = nlohmann::json::object();
  for (auto c : kCriteria) compliance[std::string(to_string(c))] = compliance_fraction(outs, c);
  return {{"statements", outs.size()}, {"compliance", compliance}, {"trend", json(trend_report(outs, facet))}};
}

}  // namespace msacheck
