#include "msacheck/classify.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace msacheck {

namespace {

void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "threshold must lie in [0,1], got " + std::to_string(tau));
  }
}

void fill_cell(PredictionCell& cell, const RelevanceBackend& backend, const Sentence& s,
               const ContextWindow& ctx, Criterion c, double tau) {
  try {
    cell.prediction = predict(backend, s, ctx, c, tau);
  } catch (const Error& e) {
    cell.error = e.kind();
    cell.message = e.what();
  } catch (const std::exception& e) {
    cell.error = ErrorKind::BackendUnavailable;
    cell.message = e.what();
  }
}

}  // namespace

void Thresholds::validate() const {
  check_tau(fallback);
  for (const auto& t : per_criterion) {
    if (t) check_tau(*t);
  }
}

RelevancePrediction predict(const RelevanceBackend& backend, const Sentence& sentence,
                            const ContextWindow& context, Criterion c, double tau) {
  check_tau(tau);
  const double p = backend.probability(c, sentence.text, context);
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::MalformedReply, "backend returned probability outside [0,1]");
  }
  RelevancePrediction out;
  out.sentence_index = sentence.index;
  out.criterion = c;
  out.probability = p;
  out.relevant = p >= tau;
  out.threshold = tau;
  out.backend_id = backend.id();
  return out;
}

PredictionMatrix::PredictionMatrix(std::size_t sentences)
    : sentences_(sentences), cells_(sentences * kCriterionCount) {}

PredictionCell& PredictionMatrix::at(Criterion c, std::size_t sentence) {
  if (sentence >= sentences_) throw Error(ErrorKind::IndexOutOfRange, "sentence index out of range");
  return cells_[index_of(c) * sentences_ + sentence];
}

const PredictionCell& PredictionMatrix::at(Criterion c, std::size_t sentence) const {
  if (sentence >= sentences_) throw Error(ErrorKind::IndexOutOfRange, "sentence index out of range");
  return cells_[index_of(c) * sentences_ + sentence];
}

std::size_t PredictionMatrix::failed_cells() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](const PredictionCell& c) { return !c.ok(); }));
}

PredictionMatrix predict_statement(const RelevanceBackend& backend, const Statement& statement,
                                   std::size_t budget, const Thresholds& thresholds,
                                   Execution execution) {
  thresholds.validate();
  const std::size_t n = statement.sentences.size();
  PredictionMatrix m(n);

  std::vector<ContextWindow> contexts;
  contexts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) contexts.push_back(build_context(statement, i, budget));

  const long total = static_cast<long>(n * kCriterionCount);
  auto cell_at = [&](long k) {
    const auto c = kCriteria[static_cast<std::size_t>(k) / (n ? n : 1)];
    const auto i = static_cast<std::size_t>(k) % (n ? n : 1);
    fill_cell(m.at(c, i), backend, statement.sentences[i], contexts[i], c, thresholds.at(c));
  };

  if (execution == Execution::Serial) {
    for (long k = 0; k < total; ++k) cell_at(k);
    return m;
  }

  int threads = omp_get_max_threads();
  if (auto cap = backend.max_concurrency(); cap > 0) {
    threads = std::min<int>(threads, static_cast<int>(cap));
  }
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (long k = 0; k < total; ++k) cell_at(k);
  return m;
}

}  // namespace msacheck
