#include <catch_amalgamated.hpp>

#include "msacheck/evidence.hpp"
#include "msacheck/paths.hpp"
#include "test_support.hpp"

using namespace msacheck;
using testsupport::json;
using testsupport::StubServer;

namespace {

const std::string kNoConcerns =
    "Across the 2023 reporting year no concerns of child labour came to light, so no remedial steps "
    "were needed";

NliBackendConfig nli_config(const std::string& url) {
  NliBackendConfig cfg;
  cfg.endpoint = url;
  cfg.hypotheses = NliBackendConfig::default_hypotheses();
  cfg.timeout_ms = 1000;
  cfg.retries = 0;
  return cfg;
}

RelevancePrediction hit(std::size_t i, Criterion c, bool relevant = true) {
  RelevancePrediction p;
  p.sentence_index = i;
  p.criterion = c;
  p.probability = relevant ? 0.9 : 0.1;
  p.relevant = relevant;
  return p;
}

Sentence sentence(std::string text, std::size_t index = 0) {
  Sentence s;
  s.index = index;
  s.text = std::move(text);
  return s;
}

}  // namespace

TEST_CASE("compiled lexicon equals the shipped data files", "[evidence]") {
  CHECK(CueLexicon::load(data_dir() / "cues") == CueLexicon::defaults());
  CHECK(NliBackendConfig::load_hypotheses(data_dir() / "cues" / "hypotheses.tsv") ==
        NliBackendConfig::default_hypotheses());
  const auto& lex = CueLexicon::defaults();
  CHECK(lex.negation_window == 6);
  for (const auto& kws : lex.keywords) CHECK_FALSE(kws.empty());
}

TEST_CASE("future cues", "[evidence]") {
  auto f = detect_future("We plan to implement a supplier audit programme.");
  CHECK(f.fired);
  CHECK(f.cue == "plan to");
  f = detect_future("We aim to extend due diligence next year.");
  CHECK(f.fired);
  CHECK(f.cue == "aim to");
  CHECK_FALSE(detect_future("We trained all staff in 2023.").fired);
  CHECK(detect_future("Training will expand to suppliers.").cue == "will");
  CHECK(detect_future("Audits are scheduled for next year.").cue == "next year");
  CHECK(detect_future("In the coming period we review contracts.").fired);
}

TEST_CASE("future cues need a verb and no past anchor", "[evidence]") {
  CHECK_FALSE(detect_future("Our plan to the board was approved.").fired);
  CHECK_FALSE(detect_future("We were committed to ethical sourcing.").fired);
  CHECK_FALSE(detect_future("We had already planned to act.").fired);
  CHECK_FALSE(detect_future("The will.").fired);
  CHECK(detect_future("We did audits, and will extend them.").fired);
  CHECK(detect_future("We are committed to remove forced labour.").fired);
}

TEST_CASE("negation scoped to criterion keywords", "[evidence]") {
  auto c3 = detect_negative_native(kNoConcerns, Criterion::C3_RiskDescription);
  CHECK(c3.fired);
  CHECK(c3.cue == "no concerns");
  CHECK(c3.source == NegativeSource::Native);
  CHECK(detect_negative_native(kNoConcerns, Criterion::C4_Remediation).fired);
  CHECK_FALSE(detect_negative_native(kNoConcerns, Criterion::Approval).fired);
  CHECK_FALSE(detect_negative_native("We provide annual training to all staff.", Criterion::C4_RiskMitigation).fired);

  auto pol = detect_negative_native("We do not have a formal policy on this.", Criterion::C4_RiskMitigation);
  CHECK(pol.fired);
  CHECK(pol.cue == "not");
  // Outside the window, or in another clause.
  CHECK_FALSE(detect_negative_native("We do not yet share our long list of very many formal policies.",
                                     Criterion::C4_RiskMitigation)
                  .fired);
  CHECK_FALSE(detect_negative_native("We have no plans; our policy is reviewed yearly.",
                                     Criterion::C4_RiskMitigation)
                  .fired);
  CHECK(detect_negative_native("We didn’t audit suppliers.", Criterion::C4_RiskMitigation).fired);
}

TEST_CASE("closed negative threshold", "[evidence]") {
  CHECK(negative_fires(0.35, 0.35));
  CHECK(negative_fires(0.36, 0.35));
  CHECK_FALSE(negative_fires(0.3499999, 0.35));
  // Lowering tau never unfires.
  for (double s : {0.1, 0.35, 0.6}) {
    for (double hi : {0.2, 0.35, 0.5}) {
      for (double lo : {0.05, 0.2, 0.35}) {
        if (lo <= hi && negative_fires(s, hi)) CHECK(negative_fires(s, lo));
      }
    }
  }
}

TEST_CASE("NLI scoring and wire format", "[evidence]") {
  json last;
  std::mutex mu;
  StubServer server([&](const json& req, int&) {
    std::lock_guard lock(mu);
    last = req;
    return json{{"scores", {0.36, 0.60}}};
  });
  auto client = std::make_shared<const NliClient>(nli_config(server.url("/nli")));
  EvidenceTracker tracker(CueLexicon::defaults(), client);
  auto d = tracker.detect_negative("Suppliers are screened.", Criterion::C4_RiskMitigation);
  CHECK(d.fired);
  CHECK(d.score == 0.36);
  CHECK(d.source == NegativeSource::Nli);
  CHECK_FALSE(d.fallback_used);
  CHECK(last.at("premise") == "Suppliers are screened.");
  REQUIRE(last.at("hypotheses").size() == 2);
  CHECK(last["hypotheses"][0] == NliBackendConfig::default_hypotheses()[6].deny);
  CHECK(last["hypotheses"][1] == NliBackendConfig::default_hypotheses()[6].acknowledge);

  auto strict = nli_config(server.url("/nli"));
  strict.tau_neg = 0.5;
  EvidenceTracker t2(CueLexicon::defaults(), std::make_shared<const NliClient>(strict));
  CHECK_FALSE(t2.detect_negative("Suppliers are screened.", Criterion::C4_RiskMitigation).fired);
}

TEST_CASE("NLI failures fall back to the native detector", "[evidence]") {
  auto dead = nli_config(testsupport::dead_url());
  EvidenceTracker down(CueLexicon::defaults(), std::make_shared<const NliClient>(dead));
  auto d = down.detect_negative(kNoConcerns, Criterion::C3_RiskDescription);
  CHECK(d.fired);
  CHECK(d.fallback_used);
  CHECK(d.source == NegativeSource::Native);
  CHECK_THAT(d.fallback_reason, Catch::Matchers::ContainsSubstring("BackendUnavailable"));

  for (json reply : {json{{"scores", {0.9}}}, json{{"scores", {0.8, 0.8}}}, json{{"scores", {-0.1, 0.5}}},
                     json{{"label", "deny"}}}) {
    StubServer bad([reply](const json&, int&) { return reply; });
    EvidenceTracker t(CueLexicon::defaults(), std::make_shared<const NliClient>(nli_config(bad.url())));
    auto r = t.detect_negative("Our audits found nothing.", Criterion::C4_RiskMitigation);
    CHECK(r.fallback_used);
    CHECK_THAT(r.fallback_reason, Catch::Matchers::ContainsSubstring("MalformedReply"));
  }
}

TEST_CASE("NLI configuration validation", "[evidence]") {
  auto cfg = nli_config("http://127.0.0.1:1/nli");
  CHECK_NOTHROW(cfg.validate());
  for (double tau : {0.0, 1.0, -0.2}) {
    auto c = cfg;
    c.tau_neg = tau;
    CHECK_THROWS_AS(c.validate(), Error);
  }
  auto no_hyp = cfg;
  no_hyp.hypotheses[2].deny.clear();
  CHECK_THROWS_AS(NliClient(no_hyp), Error);
}

TEST_CASE("evidence status precedence", "[evidence]") {
  EvidenceTracker tracker;
  auto s = sentence("We plan to implement a supplier audit programme.");
  auto st = tracker.evidence_status(s, Criterion::C4_RiskMitigation, hit(0, Criterion::C4_RiskMitigation));
  CHECK(st.status == EvidenceKind::FutureCommitment);
  CHECK_FALSE(st.conflict);

  auto both = sentence("We have no policy but plan to adopt one", 3);
  CHECK(tracker.detect_future(both.text).fired);
  CHECK(tracker.detect_negative(both.text, Criterion::C4_RiskMitigation).fired);
  st = tracker.evidence_status(both, Criterion::C4_RiskMitigation, hit(3, Criterion::C4_RiskMitigation));
  CHECK(st.status == EvidenceKind::NegativeEvidence);
  CHECK(st.conflict);
  CHECK(st.sentence_index == 3);

  auto done = sentence("We provide annual training to all staff.");
  st = tracker.evidence_status(done, Criterion::C4_RiskMitigation, hit(0, Criterion::C4_RiskMitigation));
  CHECK(st.status == EvidenceKind::Implemented);

  auto neg = sentence(kNoConcerns);
  CHECK(tracker.evidence_status(neg, Criterion::C3_RiskDescription, hit(0, Criterion::C3_RiskDescription))
            .status == EvidenceKind::NegativeEvidence);
}

TEST_CASE("evidence status preconditions", "[evidence]") {
  EvidenceTracker tracker;
  auto s = sentence("We audit suppliers.");
  try {
    tracker.evidence_status(s, Criterion::Approval, hit(0, Criterion::Approval, false));
    FAIL("expected NotRelevant");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotRelevant);
  }
  CHECK_THROWS_AS(tracker.evidence_status(s, Criterion::Approval, hit(0, Criterion::Signature)), Error);
  CHECK_THROWS_AS(tracker.evidence_status(s, Criterion::Approval, hit(4, Criterion::Approval)), Error);
  CHECK(parse_evidence_kind(to_string(EvidenceKind::FutureCommitment)) == EvidenceKind::FutureCommitment);
}

TEST_CASE("lexicon parse errors", "[evidence]") {
  CHECK_THROWS_AS(CueLexicon::parse("will\n", "[cues]\nno\n", ""), Error);
  CHECK_THROWS_AS(CueLexicon::parse("[cues]\nwill\n", "[window]\nsix\n[cues]\nno\n", ""), Error);
  CHECK_THROWS_AS(CueLexicon::parse("[cues]\nwill\n", "[cues]\nno\n", "C9\tx\n"), Error);
  auto lex = CueLexicon::parse("[cues]\nwill\n", "[cues]\nno\n", "Approval\tboard\n");
  CHECK(detect_negative_native("No board met.", Criterion::Approval, lex).fired);
  CHECK(detect_future("We will act.", lex).fired);
}
