#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "msacheck/corpus.hpp"
#include "msacheck/criteria.hpp"
#include "msacheck/execution.hpp"
#include "msacheck/features.hpp"

namespace msacheck {

struct TrainingConfig {
  double learning_rate = 0.5;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;  // 0 = full batch
  double l2 = 1e-4;
  std::uint64_t seed = 42;
  std::uint32_t dimension = kDefaultFeatureDimension;
};

struct LabeledExample {
  std::string sentence;
  ContextWindow context;
  std::array<bool, kCriterionCount> labels{};
};

struct ModelHead {
  Criterion criterion = Criterion::Approval;
  std::vector<double> weights;  // dense, size = dimension
  double bias = 0.0;
  double final_loss = 0.0;
  // Regularized training loss before the first epoch and after each epoch.
  std::vector<double> loss_history;
};

// One logistic head per criterion over hashed features.
class NativeModel {
 public:
  NativeModel() = default;
  NativeModel(TrainingConfig config, std::array<ModelHead, kCriterionCount> heads);

  double score(Criterion c, const FeatureVector& x) const;
  double probability(Criterion c, const FeatureVector& x) const;

  const TrainingConfig& config() const { return config_; }
  std::uint32_t dimension() const { return config_.dimension; }
  const ModelHead& head(Criterion c) const { return heads_[index_of(c)]; }

  void save(const std::filesystem::path& path) const;
  static NativeModel load(const std::filesystem::path& path);
  std::string to_text() const;
  static NativeModel from_text(std::string_view text);

  bool operator==(const NativeModel& other) const;

 private:
  TrainingConfig config_;
  std::array<ModelHead, kCriterionCount> heads_{};
};

double logistic(double z);

// Per-example featurized training set shared by the heads.
struct FeaturizedExample {
  FeatureVector features;
  std::array<bool, kCriterionCount> labels{};
};

std::vector<FeaturizedExample> featurize_examples(const std::vector<LabeledExample>& examples,
                                                  std::uint32_t dimension);

// Step size 1/L for full-batch descent, L bounding the smoothness of the
// regularized mean logistic loss.
double safe_learning_rate(const std::vector<FeaturizedExample>& data, double l2);

// Mini-batch gradient descent on the L2-regularized logistic loss, one head per
// criterion. Throws DegenerateHead when a head sees a single class.
NativeModel train_native(const std::vector<LabeledExample>& examples, const TrainingConfig& config,
                         Execution execution = Execution::Parallel);
NativeModel train_native(const std::vector<FeaturizedExample>& data, const TrainingConfig& config,
                         Execution execution = Execution::Parallel);

}  // namespace msacheck
