#include "msacheck/backend.hpp"

#include "msacheck/error.hpp"
#include "msacheck/features.hpp"
#include "msacheck/remote.hpp"
#include "msacheck/transport.hpp"

namespace msacheck {

std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::NativeLinear: return "native";
    case BackendKind::RemoteYesNo: return "remote";
  }
  return "?";
}

void BackendDescriptor::validate() const {
  switch (kind) {
    case BackendKind::NativeLinear:
      if (model_path.empty()) throw Error(ErrorKind::ConfigError, "native backend needs a model path");
      break;
    case BackendKind::RemoteYesNo:
      HttpEndpoint::parse(endpoint);
      for (auto c : kCriteria) {
        auto it = template_ids.find(c);
        if (it == template_ids.end()) {
          throw Error(ErrorKind::ConfigError,
                      "remote backend has no template for " + std::string(to_string(c)));
        }
        style_of_template(it->second);
      }
      if (timeout_ms <= 0) throw Error(ErrorKind::ConfigError, "timeout_ms must be positive");
      if (max_in_flight == 0) throw Error(ErrorKind::ConfigError, "max_in_flight must be positive");
      if (retries < 0) throw Error(ErrorKind::ConfigError, "retries must be >= 0");
      break;
  }
}

double RelevanceBackend::margin(Criterion, std::string_view, const ContextWindow&) const {
  throw Error(ErrorKind::InvalidArgument, "backend " + id() + " has no margin output");
}

NativeBackend::NativeBackend(std::shared_ptr<const NativeModel> model, std::string id)
    : model_(std::move(model)), id_(std::move(id)) {
  if (!model_) throw Error(ErrorKind::InvalidArgument, "null model");
}

double NativeBackend::probability(Criterion c, std::string_view sentence,
                                  const ContextWindow& context) const {
  return model_->probability(c, featurize(sentence, context, model_->dimension()));
}

double NativeBackend::margin(Criterion c, std::string_view sentence,
                             const ContextWindow& context) const {
  return model_->score(c, featurize(sentence, context, model_->dimension()));
}

std::unique_ptr<RelevanceBackend> make_backend(const BackendDescriptor& d) {
  d.validate();
  if (d.kind == BackendKind::NativeLinear) {
    auto model = std::make_shared<const NativeModel>(NativeModel::load(d.model_path));
    return std::make_unique<NativeBackend>(std::move(model));
  }
  return std::make_unique<RemoteYesNoBackend>(d);
}

}  // namespace msacheck
