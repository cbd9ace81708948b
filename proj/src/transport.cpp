#include "msacheck/transport.hpp"

#include <thread>

#include <httplib.h>

#include "msacheck/error.hpp"

namespace msacheck {

HttpEndpoint HttpEndpoint::parse(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos || url.substr(0, scheme) != "http") {
    throw Error(ErrorKind::ConfigError, "endpoint must be an http:// URL: '" + url + "'");
  }
  auto slash = url.find('/', scheme + 3);
  HttpEndpoint e;
  e.base = url.substr(0, slash);
  e.path = slash == std::string::npos ? "/" : url.substr(slash);
  if (e.base.size() <= scheme + 3) throw Error(ErrorKind::ConfigError, "endpoint has no host: " + url);
  return e;
}

HttpJsonClient::HttpJsonClient(const std::string& url, int timeout_ms, std::size_t max_in_flight,
                               int retries)
    : url_(url),
      endpoint_(HttpEndpoint::parse(url)),
      timeout_ms_(timeout_ms),
      max_in_flight_(max_in_flight == 0 ? 1 : max_in_flight),
      retries_(retries < 0 ? 0 : retries),
      slots_(std::make_unique<std::counting_semaphore<>>(
          static_cast<std::ptrdiff_t>(max_in_flight_))) {}

nlohmann::json HttpJsonClient::post(const nlohmann::json& body) const {
  struct Slot {
    std::counting_semaphore<>& s;
    explicit Slot(std::counting_semaphore<>& sem) : s(sem) { s.acquire(); }
    ~Slot() { s.release(); }
  } slot(*slots_);

  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(20 * attempt));
    httplib::Client client(endpoint_.base);
    client.set_connection_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_read_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_write_timeout(std::chrono::milliseconds(timeout_ms_));
    auto res = client.Post(endpoint_.path, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorKind::BackendUnavailable, url_ + " answered HTTP " + std::to_string(res->status));
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorKind::MalformedReply, "response from " + url_ + " is not JSON");
    }
  }
  throw Error(ErrorKind::BackendUnavailable, url_ + ": " + last_error);
}

}  // namespace msacheck
