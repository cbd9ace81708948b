#pragma once

#include <memory>
#include <semaphore>
#include <string>

#include <json.hpp>

namespace msacheck {

struct HttpEndpoint {
  std::string base;  // scheme://host:port
  std::string path;  // begins with '/'

  static HttpEndpoint parse(const std::string& url);  // throws ConfigError
};

// JSON-over-HTTP POST client shared by the remote classifier and the NLI
// detector: bounded in-flight requests, per-request timeout, and retries on
// transport failure or 5xx (requests are pure queries, so retrying is safe).
class HttpJsonClient {
 public:
  HttpJsonClient(const std::string& url, int timeout_ms, std::size_t max_in_flight, int retries);

  // Throws BackendUnavailable on transport failure or non-2xx status,
  // MalformedReply when the body is not JSON.
  nlohmann::json post(const nlohmann::json& body) const;

  const std::string& url() const { return url_; }
  std::size_t max_in_flight() const { return max_in_flight_; }

 private:
  std::string url_;
  HttpEndpoint endpoint_;
  int timeout_ms_;
  std::size_t max_in_flight_;
  int retries_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

}  // namespace msacheck
