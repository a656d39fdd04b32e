#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <string>

#include "proxiclass/quality/quality.hpp"
#include "proxiclass/reports/ci_reports.hpp"
#include "proxiclass/sis/proximity_board.hpp"
#include "proxiclass/sis/store.hpp"

namespace httplib {
class Server;
}

namespace proxiclass::sis {

struct ServiceSettings {
  quality::QualityConfig quality;
  reports::BestPracticePolicy policy;
  std::chrono::milliseconds stream_keepalive{15000};
};

int http_status(ErrorCode code) noexcept;

// HTTP+JSON front end over a SisStore and a ProximityBoard.
//
//   POST /devices                              {udid, student_id}
//   GET  /students/by-udid/{udid}
//   POST /records                              BehaviorRecord
//   GET  /records?student_id&teacher_id&lesson_id&from&to
//   GET  /reports/quality?from&to
//   GET  /reports/teachers/{id}/alignment?from&to[&bucket=week]
//   GET  /reports/school/kpi?from&to[&bucket=week]
//   GET  /proximity/current?teacher_id
//   GET  /proximity/stream?teacher_id          text/event-stream
//   POST /proximity/scan                       {teacher_id, ts, advertisements}
class SisHttpServer {
 public:
  SisHttpServer(SisStore& store, ProximityBoard& board, ServiceSettings settings = {});
  ~SisHttpServer();

  SisHttpServer(const SisHttpServer&) = delete;
  SisHttpServer& operator=(const SisHttpServer&) = delete;

  bool bind(const std::string& host, int port);
  // Returns the chosen port, or -1.
  int bind_to_any_port(const std::string& host);
  // Blocks until stop(). Returns false if the listener failed.
  bool listen_after_bind();
  void stop();
  bool is_running() const;
  void wait_until_ready() const;

 private:
  void install_routes();

  SisStore& store_;
  ProximityBoard& board_;
  ServiceSettings settings_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<bool> stopping_{false};
};

}  // namespace proxiclass::sis
