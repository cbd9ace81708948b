#include <benchmark/benchmark.h>

#include <random>

#include "msacheck/explain.hpp"
#include "msacheck/features.hpp"
#include "msacheck/shapley.hpp"
#include "msacheck/synthetic.hpp"

using namespace msacheck;

namespace {

TableGame random_game(std::size_t m) {
  std::mt19937_64 rng(m);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> t(std::size_t{1} << m);
  for (auto& x : t) x = u(rng);
  return TableGame(m, std::move(t));
}

Execution execution_of(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::Serial : Execution::Parallel;
}

const NativeModel& bench_model() {
  static const NativeModel model = [] {
    SyntheticCorpusOptions o;
    o.per_criterion = 200;
    o.negatives = 200;
    TrainingConfig tc;
    tc.dimension = 1u << 16;
    return train_native(synthetic_corpus(o), tc);
  }();
  return model;
}

void BM_ExactShapleyTable(benchmark::State& state) {
  const auto g = random_game(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exact_shapley(g, 16, execution_of(state)));
}
BENCHMARK(BM_ExactShapleyTable)->ArgsProduct({{6, 8, 10, 12}, {0, 1}});

void BM_KernelShapTable(benchmark::State& state) {
  const auto g = random_game(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernel_shap(g, 1024, 7, execution_of(state)));
}
BENCHMARK(BM_KernelShapTable)->ArgsProduct({{12, 16}, {0, 1}});

// Attribution of a native-model sentence: the value function re-featurizes a
// masked sentence per coalition, so this is the realistic cost.
void BM_ExplainSentence(benchmark::State& state) {
  static const NativeBackend backend(std::make_shared<const NativeModel>(bench_model()));
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  const auto& words = synthetic_filler();
  std::string sentence;
  for (std::size_t i = 0; i < m; ++i) sentence += (i ? " " : "") + words[i % words.size()];
  ExplainOptions opt;
  opt.execution = execution_of(state);
  opt.kernel_budget = 512;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        explain_prediction(backend, sentence, ContextWindow{}, Criterion::C4_RiskMitigation, opt));
  }
}
BENCHMARK(BM_ExplainSentence)->ArgsProduct({{8, 12, 20}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Featurize(benchmark::State& state) {
  ContextWindow ctx;
  ctx.before_text = "Our suppliers include apparel vendors in several countries and regions.";
  ctx.after_text = "We monitor effectiveness through audit coverage and closure rates.";
  const std::string sentence = "Due diligence training was delivered to all buying staff this year.";
  for (auto _ : state) benchmark::DoNotOptimize(featurize(sentence, ctx, 1u << 18));
}
BENCHMARK(BM_Featurize);

void BM_Train(benchmark::State& state) {
  SyntheticCorpusOptions o;
  o.per_criterion = 100;
  o.negatives = 100;
  TrainingConfig tc;
  tc.dimension = 1u << 14;
  tc.epochs = 3;
  const auto data = featurize_examples(synthetic_corpus(o), tc.dimension);
  for (auto _ : state) benchmark::DoNotOptimize(train_native(data, tc, execution_of(state)));
}
BENCHMARK(BM_Train)->ArgsProduct({{0}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
