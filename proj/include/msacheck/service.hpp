#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "msacheck/pipeline.hpp"
#include "msacheck/store.hpp"

namespace httplib {
class Server;
}

namespace msacheck {

// HTTP+JSON API over a store:
//   GET  /statements              GET  /statements/{id}
//   POST /statements  (JSONL)     POST /runs          GET /runs/{id}
//   POST /reviews                 POST /determinations
//   GET  /reports/{run_id}?facet=sector|turnover|year
class Service {
 public:
  Service(Store& store, std::shared_ptr<const Pipeline> pipeline);
  ~Service();

  // Binds and serves on a background thread; returns the bound port
  // (port 0 picks a free one). Throws ConfigError when binding fails.
  int start(const std::string& host, int port);
  // Blocks serving on the calling thread.
  void listen(const std::string& host, int port);
  void stop();
  // Waits for background pipeline runs to finish.
  void wait_for_runs();

 private:
  void routes();
  std::string submit_run(std::vector<std::string> ids, const PipelineConfig* overrides);

  Store& store_;
  std::shared_ptr<const Pipeline> pipeline_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;

  std::mutex runs_mu_;
  std::map<std::string, PipelineRun> runs_;
  std::vector<std::thread> workers_;
};

// HTTP status for a library error kind.
int http_status(ErrorKind kind);

}  // namespace msacheck
