#pragma once

#include <memory>
#include <string>

#include "palm/config.h"
#include "palm/snapshot_store.h"

namespace httplib {
class Server;
}

namespace palm {

/// HTTP front end under /api/v1:
///   GET  /map                 filtered MapView (?student=&layers=&metrics=&grade_mode=)
///   GET  /courses/{id}        hover card (?student=&metrics=&grade_mode=)
///   POST /ingest              multipart layout/engagement/grades[/grade_scale], admin token
///   POST /analyze/survey      JSON {instrument, pre, post[, alpha_normality]}
class ApiServer {
 public:
  ApiServer(ServiceConfig config, SnapshotStore& store);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds without serving. Port 0 picks an ephemeral port. Returns the bound
  /// port, or -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  void routes();

  ServiceConfig config_;
  SnapshotStore& store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace palm
