#include "test_support.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

#include "msacheck/paths.hpp"
#include "msacheck/synthetic.hpp"

namespace testsupport {

TempDir::TempDir() {
  std::random_device rd;
  path = fs::temp_directory_path() / ("msacheck-test-" + std::to_string(rd()) + std::to_string(rd()));
  fs::create_directories(path);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path, ec);
}

StubServer::StubServer(Handler handler) : server_(std::make_unique<httplib::Server>()) {
  server_->Post(R"(/.*)", [this, handler](const httplib::Request& req, httplib::Response& res) {
    ++calls_;
    const int now = ++in_flight_;
    for (int seen = peak_.load(); now > seen && !peak_.compare_exchange_weak(seen, now);) {
    }
    int status = 200;
    json body;
    try {
      body = handler(json::parse(req.body), status);
    } catch (const std::exception& e) {
      status = 500;
      body = {{"error", e.what()}};
    }
    res.status = status;
    res.set_content(body.is_string() ? body.get<std::string>() : body.dump(), "application/json");
    --in_flight_;
  });
  port_ = server_->bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

StubServer::~StubServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string StubServer::url(const std::string& path) const {
  return "http://127.0.0.1:" + std::to_string(port_) + path;
}

std::string dead_url() {
  // Bind and release a port so nothing is listening on it.
  httplib::Server s;
  const int port = s.bind_to_any_port("127.0.0.1");
  s.stop();
  return "http://127.0.0.1:" + std::to_string(port) + "/classify";
}

std::string random_document(std::mt19937_64& rng, std::size_t sentences) {
  static const std::vector<std::string> words = {
      "we",    "audit",   "suppliers", "Acme",  "plc",     "risk",   "the",    "board",
      "e.g.",  "Pty.",    "Ltd.",      "3.5%",  "2023",    "U.K.",   "Mr.",    "café",
      "naïve", "—",       "“quoted”",  "(see",  "above)",  "No.",    "vs.",    "etc.",
      "and",   "staff",   "training",  "…",     "approx.", "labour", "policy", "€20m"};
  static const std::vector<std::string> enders = {".", "!", "?", "?!", "...", ".\"", ".)"};
  static const std::vector<std::string> bullets = {"- ", "* ", "• ", "1. ", "2) ", "▪ "};
  static const std::vector<std::string> gaps = {" ", "  ", "\n", "\n\n", "\t", " \n "};
  auto pick = [&](const std::vector<std::string>& v) -> const std::string& { return v[rng() % v.size()]; };

  std::string doc;
  if (rng() % 3 == 0) doc += pick(gaps);
  for (std::size_t s = 0; s < sentences; ++s) {
    if (s > 0) doc += pick(gaps);
    if (rng() % 5 == 0) doc += (doc.empty() || doc.back() == '\n' ? "" : "\n") + pick(bullets);
    const std::size_t n = 1 + rng() % 12;
    for (std::size_t w = 0; w < n; ++w) {
      if (w) doc += ' ';
      std::string word = pick(words);
      if (w == 0 && !word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 32);
      doc += word;
    }
    doc += pick(enders);
  }
  if (rng() % 3 == 0) doc += pick(gaps);
  return doc;
}

const msacheck::NativeModel& shared_model() {
  static const msacheck::NativeModel model = [] {
    msacheck::SyntheticCorpusOptions o;
    o.per_criterion = 120;
    o.negatives = 120;
    o.context_words = 4;
    o.seed = 11;
    msacheck::TrainingConfig tc;
    tc.epochs = 15;
    tc.dimension = 1u << 16;
    return msacheck::train_native(msacheck::synthetic_corpus(o), tc);
  }();
  return model;
}

fs::path sample_statements() { return msacheck::data_dir() / "sample" / "statements.jsonl"; }
fs::path sample_model() { return msacheck::data_dir() / "sample" / "model.json"; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testsupport
