#include "proxiclass/sis/http_api.hpp"

#include <httplib.h>

#include <algorithm>
#include <functional>

#include "proxiclass/core/json.hpp"
#include "proxiclass/proximity/trace.hpp"

namespace proxiclass::sis {

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::malformed: return 400;
    case ErrorCode::validation_warning: return 422;
  }
  return 400;
}

namespace {

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& detail) {
  send_json(res, http_status(code), json{{"code", std::string(to_string(code))}, {"detail", detail}});
}

// Maps domain exceptions onto {code, detail} responses.
Handler guarded(Handler h) {
  return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
    try {
      h(req, res);
    } catch (const ApiError& e) {
      send_error(res, e.code(), e.detail());
    } catch (const json::exception& e) {
      send_error(res, ErrorCode::malformed, e.what());
    } catch (const std::invalid_argument& e) {
      send_error(res, ErrorCode::malformed, e.what());
    }
  };
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  auto v = req.get_param_value(name);
  if (v.empty()) return std::nullopt;
  return v;
}

std::optional<Timestamp> time_param(const httplib::Request& req, const char* name) {
  auto v = param(req, name);
  if (!v) return std::nullopt;
  return parse_rfc3339(*v);
}

struct TimeRange {
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;

  bool contains(Timestamp t) const { return (!from || t >= *from) && (!to || t <= *to); }
};

TimeRange range_params(const httplib::Request& req) {
  TimeRange r{time_param(req, "from"), time_param(req, "to")};
  if (r.from && r.to && *r.to < *r.from) throw ApiError(ErrorCode::malformed, "inverted time range: from > to");
  return r;
}

// Records by event_ts and lessons by start, restricted to the range.
struct ReportInputs {
  StoreSnapshot snap;
  std::vector<BehaviorRecord> records;
  std::vector<Lesson> lessons;
  std::vector<std::string> roster;
};

ReportInputs report_inputs(const SisStore& store, const TimeRange& range) {
  ReportInputs in{store.snapshot(), {}, {}, {}};
  for (const auto& r : in.snap.records)
    if (range.contains(r.event_ts)) in.records.push_back(r);
  for (const auto& l : in.snap.lessons)
    if (range.contains(l.start)) in.lessons.push_back(l);
  in.roster = in.snap.roster();
  return in;
}

// Explicit bounds win; otherwise the span of the data itself.
std::optional<std::pair<Timestamp, Timestamp>> series_bounds(const ReportInputs& in, const TimeRange& range) {
  std::optional<Timestamp> lo = range.from;
  std::optional<Timestamp> hi = range.to;
  for (const auto& r : in.records) {
    if (!range.from) lo = lo ? std::min(*lo, r.event_ts) : r.event_ts;
    if (!range.to) hi = hi ? std::max(*hi, r.event_ts) : r.event_ts;
  }
  for (const auto& l : in.lessons) {
    if (!range.from) lo = lo ? std::min(*lo, l.start) : l.start;
    if (!range.to) hi = hi ? std::max(*hi, l.start) : l.start;
  }
  if (!lo || !hi) return std::nullopt;
  return std::pair{*lo, *hi};
}

bool weekly_bucket(const httplib::Request& req) {
  auto b = param(req, "bucket");
  if (!b) return false;
  if (*b != "week") throw ApiError(ErrorCode::malformed, "bucket must be \"week\"");
  return true;
}

json proximity_body(const SisStore& store, const ProximitySnapshot& snap) {
  json body{{"teacher_id", snap.teacher_id}, {"udid", nullptr}};
  if (snap.udid) {
    body["udid"] = snap.udid->str();
    if (auto id = store.student_for_udid(*snap.udid)) {
      if (auto s = store.student(*id)) body["student"] = *s;
    }
  }
  return body;
}

}  // namespace

SisHttpServer::SisHttpServer(SisStore& store, ProximityBoard& board, ServiceSettings settings)
    : store_(store), board_(board), settings_(std::move(settings)), server_(std::make_unique<httplib::Server>()) {
  settings_.quality.validate();
  settings_.policy.validate();
  install_routes();
}

SisHttpServer::~SisHttpServer() { stop(); }

bool SisHttpServer::bind(const std::string& host, int port) { return server_->bind_to_port(host, port); }

int SisHttpServer::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool SisHttpServer::listen_after_bind() { return server_->listen_after_bind(); }

void SisHttpServer::stop() {
  stopping_ = true;
  if (server_->is_running()) server_->stop();
}

bool SisHttpServer::is_running() const { return server_->is_running(); }

void SisHttpServer::wait_until_ready() const { server_->wait_until_ready(); }

void SisHttpServer::install_routes() {
  auto& srv = *server_;

  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      send_error(res, ErrorCode::not_found, "no route for " + req.method + " " + req.path);
    }
  });

  srv.Post("/devices", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    const auto udid = Udid::parse(body.at("udid").get<std::string>());
    const auto student_id = body.at("student_id").get<std::string>();
    store_.register_device(udid, student_id);
    send_json(res, 201, json{{"udid", udid.str()}, {"student_id", student_id}});
  }));

  srv.Get(R"(/students/by-udid/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto udid = Udid::parse(req.matches[1].str());
    const auto view = store_.lookup_by_udid(udid);
    send_json(res, 200, json{{"student", view.student}, {"recent_records", view.recent_records}});
  }));

  srv.Post("/records", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto record = json::parse(req.body).get<BehaviorRecord>();
    const auto outcome = store_.write_record(record);
    send_json(res, 201, json{{"record_id", record.record_id}, {"outcome", std::string(to_string(outcome))}});
  }));

  srv.Get("/records", guarded([this](const httplib::Request& req, httplib::Response& res) {
    RecordFilter f;
    f.student_id = param(req, "student_id");
    f.teacher_id = param(req, "teacher_id");
    f.lesson_id = param(req, "lesson_id");
    f.from = time_param(req, "from");
    f.to = time_param(req, "to");
    send_json(res, 200, json(store_.query_records(f)));
  }));

  srv.Get("/reports/quality", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto in = report_inputs(store_, range_params(req));
    send_json(res, 200, json(quality::quality_report(in.records, in.snap.taxonomy, in.roster, settings_.quality)));
  }));

  srv.Get(R"(/reports/teachers/([^/]+)/alignment)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            const std::string teacher_id = req.matches[1].str();
            if (!store_.teacher(teacher_id)) throw ApiError(ErrorCode::not_found, "unknown teacher " + teacher_id);
            const auto range = range_params(req);
            const auto in = report_inputs(store_, range);
            if (weekly_bucket(req)) {
              json series = json::array();
              if (auto b = series_bounds(in, range)) {
                series = reports::teacher_alignment_series(teacher_id, in.records, in.lessons, in.snap.taxonomy,
                                                           settings_.policy, b->first, b->second);
              }
              send_json(res, 200, json{{"teacher_id", teacher_id}, {"bucket", "week"}, {"series", series}});
              return;
            }
            const auto all = reports::all_teacher_alignments(in.records, in.lessons, in.snap.taxonomy, settings_.policy);
            auto it = std::find_if(all.begin(), all.end(), [&](const auto& a) { return a.teacher_id == teacher_id; });
            if (it != all.end()) {
              send_json(res, 200, json(*it));
              return;
            }
            // A teacher without lessons in range is scored against the others.
            std::vector<BehaviorRecord> own;
            for (const auto& r : in.records)
              if (r.teacher_id == teacher_id) own.push_back(r);
            std::vector<double> peers;
            for (const auto& a : all) peers.push_back(a.alignment);
            auto mine = reports::alignment_components(teacher_id, own, {}, in.snap.taxonomy, settings_.policy);
            peers.push_back(mine.alignment);
            mine.peer_percentile = reports::peer_percentile(mine.alignment, peers);
            send_json(res, 200, json(mine));
          }));

  srv.Get("/reports/school/kpi", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto range = range_params(req);
    const auto in = report_inputs(store_, range);
    if (weekly_bucket(req)) {
      json series = json::array();
      if (auto b = series_bounds(in, range)) {
        series = reports::school_kpi_series(in.records, in.snap.taxonomy, in.roster, in.lessons, settings_.policy,
                                            settings_.quality, b->first, b->second);
      }
      send_json(res, 200, json{{"bucket", "week"}, {"series", series}});
      return;
    }
    send_json(res, 200,
              json(reports::school_kpi(in.records, in.snap.taxonomy, in.roster, in.lessons, settings_.policy,
                                       settings_.quality)));
  }));

  srv.Get("/proximity/current", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto teacher_id = param(req, "teacher_id");
    if (!teacher_id) throw ApiError(ErrorCode::malformed, "teacher_id is required");
    send_json(res, 200, proximity_body(store_, board_.current(*teacher_id)));
  }));

  srv.Post("/proximity/scan", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    const auto teacher_id = body.at("teacher_id").get<std::string>();
    const auto ads = body.at("advertisements").get<std::vector<proximity::Advertisement>>();
    Timestamp now;
    if (body.contains("ts")) {
      now = timestamp_from_json(body.at("ts"));
    } else if (!ads.empty()) {
      now = std::max_element(ads.begin(), ads.end(), [](const auto& a, const auto& b) { return a.ts < b.ts; })->ts;
    } else {
      throw ApiError(ErrorCode::malformed, "ts is required when no advertisements are given");
    }
    send_json(res, 200, proximity_body(store_, board_.scan(teacher_id, ads, now)));
  }));

  srv.Get("/proximity/stream", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto teacher_id = param(req, "teacher_id");
    if (!teacher_id) throw ApiError(ErrorCode::malformed, "teacher_id is required");
    res.set_header("Cache-Control", "no-cache");
    auto last = std::make_shared<std::optional<std::uint64_t>>();
    auto idle = std::make_shared<std::chrono::milliseconds>(0);
    res.set_chunked_content_provider(
        "text/event-stream",
        [this, teacher = *teacher_id, last, idle](std::size_t, httplib::DataSink& sink) {
          constexpr std::chrono::milliseconds kPoll{200};
          if (stopping_) return false;
          std::optional<ProximitySnapshot> snap;
          if (!*last) {
            snap = board_.current(teacher);
          } else {
            snap = board_.wait_for_change(teacher, **last, kPoll);
          }
          std::string chunk;
          if (snap) {
            *last = snap->version;
            *idle = std::chrono::milliseconds{0};
            chunk = "event: proximity\ndata: " + proximity_body(store_, *snap).dump() + "\n\n";
          } else {
            *idle += kPoll;
            if (*idle < settings_.stream_keepalive) return !stopping_.load();
            *idle = std::chrono::milliseconds{0};
            chunk = ": keepalive\n\n";
          }
          return sink.write(chunk.data(), chunk.size()) && !stopping_;
        });
  }));
}

}  // namespace proxiclass::sis
