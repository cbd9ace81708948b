#include "msacheck/service.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

#include <httplib.h>

#include "msacheck/error.hpp"
#include "msacheck/serialization.hpp"
#include "msacheck/text.hpp"

namespace msacheck {

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound:
    case ErrorKind::UnknownTarget: return 404;
    case ErrorKind::VersionConflict:
    case ErrorKind::StaleRevision: return 409;
    case ErrorKind::InvalidDetermination: return 422;
    case ErrorKind::BackendUnavailable: return 503;
    default: return 400;
  }
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
  send_json(res, status, {{"error", kind}, {"message", message}});
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Wraps a handler so library errors map onto status codes.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.kind()), std::string(to_string(e.kind())), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "MalformedInput", e.what());
    }
  };
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedInput, e.what());
  }
}

json statement_view(const Store& store, const std::string& id) {
  const auto rec = store.get_record(id);
  json preds = json::array(), attrs = json::array(), ev = json::array(), reviews = json::array(),
       dets = json::array();
  if (rec.predictions) {
    for (auto c : kCriteria) {
      for (std::size_t i = 0; i < rec.predictions->sentence_count(); ++i) {
        preds.push_back(prediction_record(id, c, i, rec.predictions->at(c, i)));
      }
    }
  }
  for (const auto& [k, a] : rec.attributions) attrs.push_back(attribution_record(id, k, a));
  for (const auto& [k, e] : rec.evidence) ev.push_back(evidence_record(id, e));
  for (const auto& entry : store.audit_log()) {
    const auto j = audit_record(entry);
    if (j.at("statement_id") != id) continue;
    (j.at("kind") == "review" ? reviews : dets).push_back(j);
  }
  return {{"statement", rec.statement},
          {"predictions", preds},
          {"attributions", attrs},
          {"evidence", ev},
          {"reviews", reviews},
          {"determinations", dets},
          {"effective_relevance", relevance_json(store.effective_relevance(id))}};
}

}  // namespace

Service::Service(Store& store, std::shared_ptr<const Pipeline> pipeline)
    : store_(store), pipeline_(std::move(pipeline)), server_(std::make_unique<httplib::Server>()) {
  routes();
}

Service::~Service() {
  stop();
  wait_for_runs();
}

void Service::routes() {
  auto& s = *server_;

  s.Get("/statements", guarded([this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& id : store_.statement_ids()) out.push_back(store_.get_statement(id));
    send_json(res, 200, out);
  }));

  s.Get(R"(/statements/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, statement_view(store_, req.matches[1]));
  }));

  // JSONL upload: ingest only; per-line results, 201 if anything was stored.
  s.Post("/statements", guarded([this](const httplib::Request& req, httplib::Response& res) {
    json results = json::array();
    std::size_t line_no = 0, stored = 0;
    std::istringstream in(req.body);
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      try {
        auto input = parse_statement_input(line);
        auto st = ingest_statement(std::move(input.text), input.metadata, input.id);
        store_.put_statement(st);
        ++stored;
        results.push_back({{"line", line_no}, {"id", st.id}, {"sentences", st.sentences.size()}});
      } catch (const Error& e) {
        results.push_back({{"line", line_no}, {"error", to_string(e.kind())}, {"message", e.what()}});
      }
    }
    send_json(res, stored > 0 ? 201 : 400, {{"stored", stored}, {"results", results}});
  }));

  s.Post("/runs", guarded([this](const httplib::Request& req, httplib::Response& res) {
    json body = req.body.empty() ? json::object() : parse_body(req);
    std::vector<std::string> ids = body.contains("statement_ids")
                                       ? body.at("statement_ids").get<std::vector<std::string>>()
                                       : store_.statement_ids();
    for (const auto& id : ids) {
      if (!store_.contains(id)) throw Error(ErrorKind::NotFound, "no statement " + id);
    }
    std::optional<PipelineConfig> overrides;
    json knobs = body;
    knobs.erase("statement_ids");
    if (!knobs.empty()) overrides = config_from_json(knobs, pipeline_->config());
    const auto run_id = submit_run(std::move(ids), overrides ? &*overrides : nullptr);
    send_json(res, 202, {{"run_id", run_id}, {"location", "/runs/" + run_id}});
  }));

  s.Get(R"(/runs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(runs_mu_);
    auto it = runs_.find(req.matches[1]);
    if (it == runs_.end()) throw Error(ErrorKind::NotFound, "no run " + std::string(req.matches[1]));
    send_json(res, 200, to_json(it->second));
  }));

  s.Post("/reviews", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto d = parse_guard([&] { return parse_body(req).get<ReviewDecision>(); });
    if (d.timestamp.empty()) d.timestamp = utc_now();
    const auto rev = store_.append_review(d);
    d.revision = rev;
    d.expected_revision.reset();
    send_json(res, 201, d);
  }));

  s.Post("/determinations", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto d = parse_guard([&] { return parse_body(req).get<ComplianceDetermination>(); });
    if (d.timestamp.empty()) d.timestamp = utc_now();
    const auto rev = store_.append_determination(d);
    d.revision = rev;
    d.expected_revision.reset();
    send_json(res, 201, d);
  }));

  s.Get(R"(/reports/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    PipelineRun run;
    {
      std::lock_guard lock(runs_mu_);
      auto it = runs_.find(req.matches[1]);
      if (it == runs_.end()) throw Error(ErrorKind::NotFound, "no run " + std::string(req.matches[1]));
      run = it->second;
    }
    if (run.state != RunState::Completed) {
      send_error(res, 409, "RunInProgress", "run " + run.run_id + " has not completed");
      return;
    }
    const std::string facet_name = req.has_param("facet") ? req.get_param_value("facet") : "sector";
    auto facet = parse_facet(facet_name);
    if (!facet) throw Error(ErrorKind::InvalidArgument, "facet must be sector, turnover or year");
    json body = run_report(store_, run.statement_ids, *facet);
    body["run_id"] = run.run_id;
    send_json(res, 200, body);
  }));
}

std::string Service::submit_run(std::vector<std::string> ids, const PipelineConfig* overrides) {
  std::shared_ptr<const Pipeline> pipeline = pipeline_;
  if (overrides) {
    pipeline = std::make_shared<const Pipeline>(
        std::shared_ptr<const RelevanceBackend>(pipeline_, &pipeline_->backend()), *overrides,
        std::shared_ptr<const EvidenceTracker>(pipeline_, &pipeline_->tracker()));
  }
  // The id is known before the run starts; it is a hash of inputs and config.
  std::string all;
  for (const auto& id : ids) all += id + '\n';
  const auto run_id = make_run_id(text::hex64(text::fnv1a64("stored\n" + all)), pipeline->backend().id(),
                                  pipeline->config());
  {
    std::lock_guard lock(runs_mu_);
    auto it = runs_.find(run_id);
    if (it != runs_.end() && it->second.state == RunState::Running) return run_id;
    PipelineRun placeholder;
    placeholder.run_id = run_id;
    placeholder.backend_id = pipeline->backend().id();
    placeholder.backend_kind = pipeline->backend().kind();
    placeholder.context_budget = pipeline->config().context_budget;
    placeholder.threshold = pipeline->config().thresholds.fallback;
    placeholder.seed = pipeline->config().seed;
    runs_[run_id] = placeholder;
    workers_.emplace_back([this, pipeline, ids = std::move(ids), run_id] {
      auto run = pipeline->run_stored(ids, store_);
      std::lock_guard lock(runs_mu_);
      runs_[run_id] = std::move(run);
    });
  }
  return run_id;
}

int Service::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(ErrorKind::ConfigError, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void Service::listen(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorKind::ConfigError, "cannot bind " + host + ":" + std::to_string(port));
  }
  server_->listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void Service::wait_for_runs() {
  std::vector<std::thread> ws;
  {
    std::lock_guard lock(runs_mu_);
    ws.swap(workers_);
  }
  for (auto& w : ws) {
    if (w.joinable()) w.join();
  }
}

}  // namespace msacheck
