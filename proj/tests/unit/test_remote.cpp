#include <catch_amalgamated.hpp>

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "msacheck/classify.hpp"
#include "msacheck/remote.hpp"
#include "test_support.hpp"

using namespace msacheck;
using testsupport::json;
using testsupport::StubServer;

namespace {

BackendDescriptor remote(const std::string& url, PromptStyle style = PromptStyle::ZeroShot) {
  BackendDescriptor d;
  d.kind = BackendKind::RemoteYesNo;
  d.endpoint = url;
  d.timeout_ms = 2000;
  d.retries = 1;
  for (auto c : kCriteria) d.template_ids[c] = template_id(style, c);
  return d;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("YES/NO reply parsing", "[remote]") {
  CHECK(parse_yes_no("YES", false));
  CHECK_FALSE(parse_yes_no("no", false));
  CHECK(parse_yes_no("  Yes.\n", false));
  CHECK(parse_yes_no("The answer is **YES**", false));
  CHECK_THROWS_AS(parse_yes_no("maybe", false), Error);
  CHECK_THROWS_AS(parse_yes_no("", false), Error);
  CHECK_THROWS_AS(parse_yes_no("YES, probably", false), Error);

  const std::string cot = "Reasoning: mentions approval by the board, so yes.\nFinal Answer: NO\n";
  CHECK_FALSE(parse_yes_no(cot, true));
  CHECK(parse_yes_no("Reasoning...\n**Final Answer**: Yes", true));
  CHECK(parse_yes_no("Final Answer: NO\nwait\nFinal Answer: YES", true));  // last one wins
  CHECK(kind_of([] { parse_yes_no("Reasoning only. YES", true); }) == ErrorKind::MalformedReply);
  CHECK(kind_of([] { parse_yes_no("Final Answer: unsure", true); }) == ErrorKind::MalformedReply);
}

TEST_CASE("prompt templates render for every style and criterion", "[remote]") {
  auto lib = PromptLibrary::load_default();
  for (auto s : {PromptStyle::ZeroShot, PromptStyle::CotZeroShot, PromptStyle::CotFewShot}) {
    for (auto c : kCriteria) {
      auto id = template_id(s, c);
      CHECK(style_of_template(id) == s);
      auto raw = lib.template_text(id);
      CHECK(raw.find("TARGET_SENTENCE") != std::string::npos);
      CHECK(raw.find("SENTENCE_IN_CONTEXT") != std::string::npos);
      auto out = lib.render(id, "<<T>>", "before <<T>> after");
      CHECK(out.find("{{") == std::string::npos);
      CHECK(out.find("TARGET_SENTENCE") == std::string::npos);
      CHECK(out.find("before <<T>> after") != std::string::npos);
      if (s == PromptStyle::ZeroShot) CHECK(out.find("Reply with exactly one word: YES or NO.") != std::string::npos);
      else CHECK(out.find("Final Answer") != std::string::npos);
    }
  }
  CHECK(kind_of([] { style_of_template("fancy/Approval"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { style_of_template("zero_shot/C9"); }) == ErrorKind::ConfigError);
}

TEST_CASE("remote descriptor validation", "[remote]") {
  auto d = remote("http://127.0.0.1:1/classify");
  CHECK_NOTHROW(d.validate());
  auto no_template = d;
  no_template.template_ids.erase(Criterion::C4_Remediation);
  CHECK(kind_of([&] { no_template.validate(); }) == ErrorKind::ConfigError);
  auto bad_url = d;
  bad_url.endpoint = "ftp://x";
  CHECK(kind_of([&] { bad_url.validate(); }) == ErrorKind::ConfigError);
  auto no_slots = d;
  no_slots.max_in_flight = 0;
  CHECK(kind_of([&] { no_slots.validate(); }) == ErrorKind::ConfigError);
  BackendDescriptor native;
  CHECK(kind_of([&] { native.validate(); }) == ErrorKind::ConfigError);
}

TEST_CASE("wire protocol and YES/NO mapping", "[remote]") {
  json last;
  std::mutex mu;
  StubServer server([&](const json& req, int&) {
    std::lock_guard lock(mu);
    last = req;
    const auto target = req.at("target_sentence").get<std::string>();
    if (target.find("board") != std::string::npos) return json{{"answer", "YES"}, {"raw", "YES"}};
    if (target.find("hedge") != std::string::npos) return json{{"answer", ""}, {"raw", "maybe"}};
    return json{{"answer", "NO"}, {"raw", "NO"}};
  });
  auto backend = make_backend(remote(server.url("/classify")));
  auto st = ingest_statement("Our board approved this. We sell shoes. We hedge here.", {});
  ContextWindow ctx = build_context(st, 0, 100);

  auto yes = predict(*backend, st.sentences[0], ctx, Criterion::Approval, 0.5);
  CHECK(yes.probability == 1.0);
  CHECK(yes.relevant);
  CHECK(last.at("criterion") == "Approval");
  CHECK(last.at("template_id") == "zero_shot/Approval");
  CHECK(last.at("target_sentence") == "Our board approved this.");
  CHECK(last.at("sentence_in_context") == "Our board approved this. We sell shoes. We hedge here.");

  auto no = predict(*backend, st.sentences[1], {}, Criterion::Approval, 0.5);
  CHECK(no.probability == 0.0);
  CHECK_FALSE(no.relevant);
  CHECK(no.backend_id.starts_with("remote-yesno:"));

  CHECK(kind_of([&] { predict(*backend, st.sentences[2], {}, Criterion::Approval, 0.5); }) ==
        ErrorKind::MalformedReply);
}

TEST_CASE("chain-of-thought replies use the final answer line", "[remote]") {
  StubServer server([](const json&, int&) {
    return json{{"raw", "The sentence says no board approved it.\nFinal Answer: YES"}};
  });
  auto cot = make_backend(remote(server.url("/c"), PromptStyle::CotFewShot));
  CHECK(cot->probability(Criterion::Approval, "x", {}) == 1.0);
  // Zero-shot parsing wants a terminal YES/NO token, which this reply has.
  auto zs = make_backend(remote(server.url("/c")));
  CHECK(zs->probability(Criterion::Approval, "x", {}) == 1.0);
}

TEST_CASE("non-JSON and error replies", "[remote]") {
  StubServer text_server([](const json&, int&) { return json("not json at all"); });
  auto b = make_backend(remote(text_server.url("/c")));
  CHECK(kind_of([&] { b->probability(Criterion::Approval, "x", {}); }) == ErrorKind::MalformedReply);

  StubServer forbidden([](const json&, int& status) {
    status = 403;
    return json::object();
  });
  auto f = make_backend(remote(forbidden.url("/c")));
  CHECK(kind_of([&] { f->probability(Criterion::Approval, "x", {}); }) == ErrorKind::BackendUnavailable);
  CHECK(forbidden.calls() == 1);  // 4xx is not retried
}

TEST_CASE("5xx replies are retried", "[remote]") {
  std::atomic<int> n{0};
  StubServer flaky([&](const json&, int& status) {
    if (n++ == 0) status = 503;
    return json{{"answer", "YES"}};
  });
  auto b = make_backend(remote(flaky.url("/c")));
  CHECK(b->probability(Criterion::Approval, "x", {}) == 1.0);
  CHECK(flaky.calls() == 2);

  StubServer down([](const json&, int& status) {
    status = 500;
    return json::object();
  });
  auto d = make_backend(remote(down.url("/c")));
  CHECK(kind_of([&] { d->probability(Criterion::Approval, "x", {}); }) == ErrorKind::BackendUnavailable);
  CHECK(down.calls() == 2);  // one try + one retry
}

TEST_CASE("unreachable backend marks every cell", "[remote]") {
  auto d = remote(testsupport::dead_url());
  d.retries = 0;
  d.timeout_ms = 500;
  auto b = make_backend(d);
  auto st = ingest_statement("One sentence here. Another one there.", {});
  auto m = predict_statement(*b, st, 100, {});
  CHECK(m.size() == 18);
  CHECK(m.failed_cells() == 18);
  for (auto c : kCriteria) CHECK(m.at(c, 1).error == ErrorKind::BackendUnavailable);
}

TEST_CASE("in-flight requests are bounded", "[remote]") {
  StubServer slow([](const json&, int&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    return json{{"answer", "NO"}};
  });
  HttpJsonClient client(slow.url("/c"), 2000, 2, 0);
  std::vector<std::thread> threads;
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&, t] { client.post(json{{"q", t}}); });
  }
  for (auto& t : threads) t.join();
  CHECK(slow.calls() == 6);
  CHECK(slow.peak_in_flight() <= 2);
  CHECK(slow.peak_in_flight() >= 1);
}

TEST_CASE("endpoint parsing", "[remote]") {
  auto e = HttpEndpoint::parse("http://127.0.0.1:8000/v1/classify");
  CHECK(e.base == "http://127.0.0.1:8000");
  CHECK(e.path == "/v1/classify");
  CHECK(HttpEndpoint::parse("http://host").path == "/");
  CHECK_THROWS_AS(HttpEndpoint::parse("https://x/y"), Error);
  CHECK_THROWS_AS(HttpEndpoint::parse("http:///y"), Error);
}
