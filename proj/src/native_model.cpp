#include "msacheck/native_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "msacheck/error.hpp"

namespace msacheck {

using nlohmann::json;

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_loss(double z, bool y) { return y ? softplus(-z) : softplus(z); }

constexpr const char* kFormat = "msacheck-native-model";
constexpr int kFormatVersion = 1;

struct HeadTrainer {
  const std::vector<FeaturizedExample>& data;
  const TrainingConfig& config;
  std::size_t head;

  double regularized_loss(const std::vector<double>& v, double scale, double bias) const {
    double sum = 0.0;
    for (const auto& ex : data) {
      sum += log_loss(scale * ex.features.dot(v) + bias, ex.labels[head]);
    }
    double sq = 0.0;
    for (double x : v) sq += x * x;
    return sum / static_cast<double>(data.size()) + 0.5 * config.l2 * scale * scale * sq;
  }

  ModelHead run() const {
    const std::size_t n = data.size();
    const double lr = config.learning_rate;
    std::vector<double> v(config.dimension, 0.0);
    double scale = 1.0;  // w = scale * v keeps the L2 decay O(1) per step
    double bias = 0.0;

    ModelHead out;
    out.criterion = kCriteria[head];
    out.loss_history.push_back(regularized_loss(v, scale, bias));

    std::mt19937_64 rng(config.seed ^ (0x9e3779b97f4a7c15ULL * (head + 1)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch = config.batch_size == 0 ? n : std::min(config.batch_size, n);
    std::vector<double> residual;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      if (config.batch_size != 0) std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < n; start += batch) {
        const std::size_t end = std::min(n, start + batch);
        const double inv = 1.0 / static_cast<double>(end - start);
        residual.clear();
        double grad_bias = 0.0;
        for (std::size_t k = start; k < end; ++k) {
          const auto& ex = data[order[k]];
          const double p = logistic(scale * ex.features.dot(v) + bias);
          const double r = (p - (ex.labels[head] ? 1.0 : 0.0)) * inv;
          residual.push_back(r);
          grad_bias += r;
        }
        scale *= (1.0 - lr * config.l2);
        const double step = lr / scale;
        for (std::size_t k = start; k < end; ++k) {
          const double r = residual[k - start];
          for (const auto& e : data[order[k]].features.entries) v[e.index] -= step * r * e.weight;
        }
        bias -= lr * grad_bias;
        if (scale < 1e-9) {
          for (double& x : v) x *= scale;
          scale = 1.0;
        }
      }
      out.loss_history.push_back(regularized_loss(v, scale, bias));
    }

    for (double& x : v) x *= scale;
    out.weights = std::move(v);
    out.bias = bias;
    out.final_loss = out.loss_history.back();
    return out;
  }
};

}  // namespace

NativeModel::NativeModel(TrainingConfig config, std::array<ModelHead, kCriterionCount> heads)
    : config_(config), heads_(std::move(heads)) {
  for (const auto& h : heads_) {
    if (h.weights.size() != config_.dimension) {
      throw Error(ErrorKind::InvalidArgument, "head weight vector does not match dimension");
    }
    if (!std::isfinite(h.bias) ||
        !std::all_of(h.weights.begin(), h.weights.end(), [](double w) { return std::isfinite(w); })) {
      throw Error(ErrorKind::InvalidArgument, "non-finite model parameter");
    }
  }
}

double NativeModel::score(Criterion c, const FeatureVector& x) const {
  if (x.dimension != config_.dimension) {
    throw Error(ErrorKind::InvalidArgument, "feature dimension does not match the model");
  }
  const auto& h = heads_[index_of(c)];
  return x.dot(h.weights) + h.bias;
}

double NativeModel::probability(Criterion c, const FeatureVector& x) const {
  return logistic(score(c, x));
}

bool NativeModel::operator==(const NativeModel& other) const {
  if (config_.dimension != other.config_.dimension || config_.seed != other.config_.seed ||
      config_.epochs != other.config_.epochs || config_.batch_size != other.config_.batch_size ||
      config_.learning_rate != other.config_.learning_rate || config_.l2 != other.config_.l2) {
    return false;
  }
  for (std::size_t i = 0; i < kCriterionCount; ++i) {
    const auto& a = heads_[i];
    const auto& b = other.heads_[i];
    if (a.criterion != b.criterion || a.bias != b.bias || a.weights != b.weights ||
        a.final_loss != b.final_loss) {
      return false;
    }
  }
  return true;
}

std::string NativeModel::to_text() const {
  json j;
  j["format"] = kFormat;
  j["version"] = kFormatVersion;
  j["config"] = {{"learning_rate", config_.learning_rate},
                 {"epochs", config_.epochs},
                 {"batch_size", config_.batch_size},
                 {"l2", config_.l2},
                 {"seed", config_.seed},
                 {"dimension", config_.dimension}};
  json heads = json::array();
  for (const auto& h : heads_) {
    json weights = json::array();
    for (std::size_t i = 0; i < h.weights.size(); ++i) {
      if (h.weights[i] != 0.0) weights.push_back({i, h.weights[i]});
    }
    heads.push_back({{"criterion", to_string(h.criterion)},
                     {"bias", h.bias},
                     {"final_loss", h.final_loss},
                     {"weights", std::move(weights)}});
  }
  j["heads"] = std::move(heads);
  return j.dump() + "\n";
}

NativeModel NativeModel::from_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedInput, std::string("model file: ") + e.what());
  }
  try {
    if (j.at("format") != kFormat) throw Error(ErrorKind::MalformedInput, "not a native model file");
    if (j.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorKind::MalformedInput, "unsupported model file version");
    }
    const auto& c = j.at("config");
    TrainingConfig config;
    config.learning_rate = c.at("learning_rate").get<double>();
    config.epochs = c.at("epochs").get<std::size_t>();
    config.batch_size = c.at("batch_size").get<std::size_t>();
    config.l2 = c.at("l2").get<double>();
    config.seed = c.at("seed").get<std::uint64_t>();
    config.dimension = c.at("dimension").get<std::uint32_t>();

    const auto& hs = j.at("heads");
    if (!hs.is_array() || hs.size() != kCriterionCount) {
      throw Error(ErrorKind::MalformedInput, "model file must contain exactly nine heads");
    }
    std::array<ModelHead, kCriterionCount> heads;
    for (std::size_t i = 0; i < kCriterionCount; ++i) {
      const auto& h = hs[i];
      ModelHead head;
      head.criterion = criterion_from_string(h.at("criterion").get<std::string>());
      if (head.criterion != kCriteria[i]) {
        throw Error(ErrorKind::MalformedInput, "model heads out of order");
      }
      head.bias = h.at("bias").get<double>();
      head.final_loss = h.at("final_loss").get<double>();
      head.weights.assign(config.dimension, 0.0);
      for (const auto& w : h.at("weights")) {
        auto idx = w.at(0).get<std::size_t>();
        if (idx >= config.dimension) throw Error(ErrorKind::MalformedInput, "weight index out of range");
        head.weights[idx] = w.at(1).get<double>();
      }
      heads[i] = std::move(head);
    }
    return NativeModel(config, std::move(heads));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedInput, std::string("model file: ") + e.what());
  }
}

void NativeModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write model file " + path.string());
  out << to_text();
}

NativeModel NativeModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

std::vector<FeaturizedExample> featurize_examples(const std::vector<LabeledExample>& examples,
                                                  std::uint32_t dimension) {
  std::vector<FeaturizedExample> out(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    out[i].features = featurize(examples[i].sentence, examples[i].context, dimension);
    out[i].labels = examples[i].labels;
  }
  return out;
}

double safe_learning_rate(const std::vector<FeaturizedExample>& data, double l2) {
  if (data.empty()) throw Error(ErrorKind::InvalidArgument, "empty training set");
  double mean_sq = 0.0;
  for (const auto& ex : data) {
    double sq = 1.0;  // bias column
    for (const auto& e : ex.features.entries) sq += e.weight * e.weight;
    mean_sq += sq;
  }
  mean_sq /= static_cast<double>(data.size());
  return 1.0 / (0.25 * mean_sq + l2);
}

NativeModel train_native(const std::vector<FeaturizedExample>& data, const TrainingConfig& config,
                         Execution execution) {
  if (data.empty()) throw Error(ErrorKind::InvalidArgument, "empty training set");
  if (!(config.learning_rate > 0) || config.l2 < 0 || config.epochs == 0) {
    throw Error(ErrorKind::ConfigError, "learning_rate > 0, l2 >= 0 and epochs >= 1 required");
  }
  for (const auto& ex : data) {
    if (ex.features.dimension != config.dimension) {
      throw Error(ErrorKind::InvalidArgument, "example feature dimension does not match config");
    }
  }
  for (std::size_t c = 0; c < kCriterionCount; ++c) {
    std::size_t pos = 0;
    for (const auto& ex : data) pos += ex.labels[c] ? 1 : 0;
    if (pos == 0 || pos == data.size()) {
      throw Error(ErrorKind::DegenerateHead,
                  std::string(to_string(kCriteria[c])) + " has single-class training data");
    }
  }

  std::array<ModelHead, kCriterionCount> heads;
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t c = 0; c < kCriterionCount; ++c) heads[c] = HeadTrainer{data, config, c}.run();
  } else {
    for (std::size_t c = 0; c < kCriterionCount; ++c) heads[c] = HeadTrainer{data, config, c}.run();
  }
  return NativeModel(config, std::move(heads));
}

NativeModel train_native(const std::vector<LabeledExample>& examples, const TrainingConfig& config,
                         Execution execution) {
  return train_native(featurize_examples(examples, config.dimension), config, execution);
}

}  // namespace msacheck
