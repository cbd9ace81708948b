#include <catch_amalgamated.hpp>

#include "msacheck/classify.hpp"
#include "msacheck/features.hpp"
#include "test_support.hpp"

using namespace msacheck;

namespace {

// Scores from a lookup keyed on the sentence text; "boom" fails.
class ScriptedBackend final : public RelevanceBackend {
 public:
  explicit ScriptedBackend(double p) : p_(p) {}
  std::string id() const override { return "scripted"; }
  BackendKind kind() const override { return BackendKind::NativeLinear; }
  double probability(Criterion c, std::string_view sentence, const ContextWindow&) const override {
    if (sentence.find("boom") != std::string_view::npos && c == Criterion::Signature) {
      throw Error(ErrorKind::BackendUnavailable, "scripted outage");
    }
    return p_;
  }

 private:
  double p_;
};

Statement two_sentences() {
  return ingest_statement("The board approved this statement. Our suppliers are audited.", {});
}

std::shared_ptr<const NativeModel> model() {
  return std::make_shared<const NativeModel>(testsupport::shared_model());
}

}  // namespace

TEST_CASE("threshold coherence", "[classify]") {
  auto st = two_sentences();
  for (double p : {0.0, 0.35, 0.5, 0.75, 1.0}) {
    ScriptedBackend b(p);
    for (double tau : {0.0, 0.35, 0.5, 1.0}) {
      auto r = predict(b, st.sentences[0], ContextWindow{}, Criterion::Approval, tau);
      CHECK(r.probability == p);
      CHECK(r.relevant == (p >= tau));
      CHECK(r.threshold == tau);
      CHECK(r.backend_id == "scripted");
    }
  }
}

TEST_CASE("zero margin gives p = 0.5 and is relevant at 0.5", "[classify]") {
  TrainingConfig tc;
  tc.dimension = 8;
  std::array<ModelHead, kCriterionCount> heads;
  for (std::size_t c = 0; c < kCriterionCount; ++c) {
    heads[c].criterion = kCriteria[c];
    heads[c].weights.assign(8, 0.0);
  }
  NativeBackend b(std::make_shared<const NativeModel>(tc, heads));
  auto st = two_sentences();
  auto r = predict(b, st.sentences[1], ContextWindow{}, Criterion::C3_RiskDescription, 0.5);
  CHECK(r.probability == 0.5);
  CHECK(r.relevant);
}

TEST_CASE("invalid thresholds and probabilities", "[classify]") {
  auto st = two_sentences();
  ScriptedBackend ok(0.4);
  CHECK_THROWS_AS(predict(ok, st.sentences[0], {}, Criterion::Approval, 1.5), Error);
  CHECK_THROWS_AS(predict(ok, st.sentences[0], {}, Criterion::Approval, -0.1), Error);
  ScriptedBackend bad(1.2);
  try {
    predict(bad, st.sentences[0], {}, Criterion::Approval, 0.5);
    FAIL("expected MalformedReply");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedReply);
  }
  Thresholds t;
  t.per_criterion[3] = 2.0;
  CHECK_THROWS_AS(t.validate(), Error);
  CHECK_THROWS_AS(predict_statement(ok, st, 0, t), Error);
}

TEST_CASE("statement matrix has one cell per criterion and sentence", "[classify]") {
  NativeBackend b(model());
  auto st = two_sentences();
  auto m0 = predict_statement(b, st, 0, {});
  auto m100 = predict_statement(b, st, 100, {});
  CHECK(m0.size() == 18);
  CHECK(m100.size() == 18);
  CHECK(m0.failed_cells() == 0);
  for (auto c : kCriteria) {
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& cell = m0.at(c, i);
      REQUIRE(cell.ok());
      CHECK(cell.prediction->criterion == c);
      CHECK(cell.prediction->sentence_index == i);
      CHECK(m100.at(c, i).prediction->criterion == c);
    }
  }
  CHECK(m0.at(Criterion::Approval, 0).prediction->relevant);
  CHECK(m0.at(Criterion::C2_SupplyChains, 1).prediction->relevant);
  CHECK_FALSE(m0.at(Criterion::C2_SupplyChains, 0).prediction->relevant);
  CHECK_THROWS_AS(m0.at(Criterion::Approval, 2), Error);
}

TEST_CASE("per-criterion thresholds apply", "[classify]") {
  ScriptedBackend b(0.6);
  Thresholds t;
  t.per_criterion[index_of(Criterion::C5_Effectiveness)] = 0.7;
  auto m = predict_statement(b, two_sentences(), 0, t);
  CHECK(m.at(Criterion::Approval, 0).prediction->relevant);
  CHECK_FALSE(m.at(Criterion::C5_Effectiveness, 0).prediction->relevant);
  CHECK(m.at(Criterion::C5_Effectiveness, 0).prediction->threshold == 0.7);
}

TEST_CASE("cell failures are recorded without aborting", "[classify]") {
  ScriptedBackend b(0.9);
  auto st = ingest_statement("It went boom. Then it was fine.", {});
  auto m = predict_statement(b, st, 0, {});
  CHECK(m.failed_cells() == 1);
  const auto& bad = m.at(Criterion::Signature, 0);
  CHECK_FALSE(bad.ok());
  CHECK(bad.error == ErrorKind::BackendUnavailable);
  CHECK_THAT(bad.message, Catch::Matchers::ContainsSubstring("scripted outage"));
  CHECK(m.at(Criterion::Signature, 1).ok());
  CHECK(m.at(Criterion::Approval, 0).ok());
}

TEST_CASE("Serial and Parallel matrices are identical", "[classify]") {
  NativeBackend b(model());
  auto st = ingest_statement("Our board approved this. We operate stores. Suppliers are audited. "
                            "We monitor kpis and indicators. Grievances led to remediation.",
                            {});
  for (std::size_t budget : {0u, 5u, 100u}) {
    CHECK(predict_statement(b, st, budget, {}, Execution::Serial) ==
          predict_statement(b, st, budget, {}, Execution::Parallel));
  }
}
