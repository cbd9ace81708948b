#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "msacheck/corpus.hpp"
#include "msacheck/criteria.hpp"
#include "msacheck/native_model.hpp"

namespace msacheck {

enum class BackendKind { NativeLinear, RemoteYesNo };

std::string_view to_string(BackendKind k);

struct BackendDescriptor {
  BackendKind kind = BackendKind::NativeLinear;
  std::string model_path;  // native
  std::string endpoint;    // remote, e.g. http://127.0.0.1:8000/classify
  std::map<Criterion, std::string> template_ids;
  int timeout_ms = 10000;
  std::size_t max_in_flight = 4;
  int retries = 2;

  void validate() const;  // throws ConfigError
};

// Relevance scorer for one (sentence, criterion) pair. Implementations must be
// safe to call concurrently.
class RelevanceBackend {
 public:
  virtual ~RelevanceBackend() = default;

  virtual std::string id() const = 0;
  virtual BackendKind kind() const = 0;

  // Throws BackendUnavailable or MalformedReply.
  virtual double probability(Criterion c, std::string_view sentence,
                             const ContextWindow& context) const = 0;

  // Raw log-odds, when the backend has one.
  virtual bool has_margin() const { return false; }
  virtual double margin(Criterion c, std::string_view sentence, const ContextWindow& context) const;

  // Upper bound on concurrent calls; 0 means unbounded.
  virtual std::size_t max_concurrency() const { return 0; }
};

class NativeBackend final : public RelevanceBackend {
 public:
  explicit NativeBackend(std::shared_ptr<const NativeModel> model, std::string id = "native-linear");

  std::string id() const override { return id_; }
  BackendKind kind() const override { return BackendKind::NativeLinear; }
  double probability(Criterion c, std::string_view sentence,
                     const ContextWindow& context) const override;
  bool has_margin() const override { return true; }
  double margin(Criterion c, std::string_view sentence, const ContextWindow& context) const override;

  const NativeModel& model() const { return *model_; }

 private:
  std::shared_ptr<const NativeModel> model_;
  std::string id_;
};

std::unique_ptr<RelevanceBackend> make_backend(const BackendDescriptor& descriptor);

}  // namespace msacheck
