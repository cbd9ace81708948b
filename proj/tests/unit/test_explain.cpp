#include <catch_amalgamated.hpp>

#include <numeric>

#include "msacheck/error.hpp"
#include "msacheck/explain.hpp"
#include "msacheck/features.hpp"
#include "msacheck/remote.hpp"
#include "msacheck/text.hpp"
#include "test_support.hpp"

using namespace msacheck;

namespace {

NativeBackend native() {
  return NativeBackend(std::make_shared<const NativeModel>(testsupport::shared_model()));
}

}  // namespace

TEST_CASE("masking keeps tokens in order", "[explain]") {
  std::vector<std::string> t = {"We", "audit", "suppliers."};
  CHECK(mask_tokens(t, {true, false, true}) == "We suppliers.");
  CHECK(mask_tokens(t, {false, false, false}).empty());
  CHECK(mask_tokens(t, {true, true, true}) == "We audit suppliers.");
  CHECK_THROWS_AS(mask_tokens(t, {true}), Error);
}

TEST_CASE("method names", "[explain]") {
  CHECK(to_string(AttributionMethod::Exact) == "exact");
  CHECK(parse_attribution_method("kernel") == AttributionMethod::Kernel);
  CHECK_FALSE(parse_attribution_method("lime").has_value());
}

TEST_CASE("attributions are efficient in probability space", "[explain]") {
  auto b = native();
  ContextWindow ctx;
  ctx.before_text = "our group and people";
  const std::string s = "The board of directors approved this statement in June.";
  auto a = explain_prediction(b, s, ctx, Criterion::Approval);
  REQUIRE(a.tokens.size() == 9);
  CHECK(a.method == AttributionMethod::Exact);
  CHECK(a.samples_used == 0);
  CHECK(a.full_value == b.probability(Criterion::Approval, s, ctx));
  CHECK(a.base_value == b.probability(Criterion::Approval, "", ctx));
  const double sum = std::accumulate(a.phi.begin(), a.phi.end(), 0.0);
  CHECK(std::abs(sum - (a.full_value - a.base_value)) <= 1e-12);
  // Planted keywords carry the prediction.
  auto top = std::max_element(a.phi.begin(), a.phi.end()) - a.phi.begin();
  CHECK((a.tokens[top] == "board" || a.tokens[top] == "directors" || a.tokens[top] == "approved"));
}

TEST_CASE("margin-space attributions equal head weights of distinct tokens", "[explain]") {
  auto b = native();
  const auto& model = testsupport::shared_model();
  const std::string s = "Suppliers sourcing risk audits grievances and monitor kpis";
  ExplainOptions opt;
  opt.space = OutputSpace::Margin;
  for (auto c : {Criterion::C2_SupplyChains, Criterion::C4_Remediation}) {
    auto a = explain_prediction(b, s, ContextWindow{}, c, opt);
    for (std::size_t i = 0; i < a.tokens.size(); ++i) {
      const auto idx = sentence_feature_index(text::normalize_token(a.tokens[i]), model.dimension());
      CHECK(std::abs(a.phi[i] - model.head(c).weights[idx]) <= 1e-10);
    }
    CHECK(a.base_value == model.head(c).bias);
  }
}

TEST_CASE("long sentences use kernel SHAP", "[explain]") {
  auto b = native();
  const std::string s =
      "we work with our suppliers on audits and training across the group every year with care";
  ExplainOptions opt;
  opt.kernel_budget = 300;
  opt.seed = 5;
  auto a = explain_prediction(b, s, ContextWindow{}, Criterion::C2_SupplyChains, opt);
  CHECK(a.method == AttributionMethod::Kernel);
  CHECK(a.tokens.size() == 16);
  CHECK(a.samples_used > 0);
  CHECK(a.samples_used <= 300);
  CHECK(explain_prediction(b, s, ContextWindow{}, Criterion::C2_SupplyChains, opt) == a);
  const double sum = std::accumulate(a.phi.begin(), a.phi.end(), 0.0);
  CHECK(std::abs(sum - (a.full_value - a.base_value)) <= 1e-10);
  opt.execution = Execution::Serial;
  CHECK(explain_prediction(b, s, ContextWindow{}, Criterion::C2_SupplyChains, opt) == a);
}

TEST_CASE("margin space needs a margin", "[explain]") {
  BackendDescriptor d;
  d.kind = BackendKind::RemoteYesNo;
  d.endpoint = "http://127.0.0.1:1/c";
  for (auto c : kCriteria) d.template_ids[c] = template_id(PromptStyle::ZeroShot, c);
  RemoteYesNoBackend remote(d);
  std::vector<std::string> tokens = {"a"};
  CHECK_THROWS_AS(SentenceGame(remote, Criterion::Approval, {}, tokens, OutputSpace::Margin), Error);
}
