#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "proxiclass/core/domain.hpp"

namespace proxiclass::sis {

enum class ErrorCode { not_found, conflict, malformed, validation_warning };

std::string_view to_string(ErrorCode c) noexcept;

class ApiError : public std::runtime_error {
 public:
  ApiError(ErrorCode code, const std::string& detail) : std::runtime_error(detail), code_(code) {}
  ErrorCode code() const noexcept { return code_; }
  std::string detail() const { return what(); }

 private:
  ErrorCode code_;
};

// Raised while replaying a corrupt event log; the message names the line.
class StoreLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RecordFilter {
  std::optional<std::string> student_id;
  std::optional<std::string> teacher_id;
  std::optional<std::string> lesson_id;
  // Inclusive bounds on event_ts.
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;
};

struct StudentView {
  Student student;
  std::vector<BehaviorRecord> recent_records;
};

struct StoreSnapshot {
  std::vector<Student> students;
  std::vector<Teacher> teachers;
  std::vector<Lesson> lessons;
  std::vector<BehaviorRecord> records;  // write order
  BehaviorTaxonomy taxonomy = BehaviorTaxonomy::standard();

  std::vector<std::string> roster() const;
};

inline constexpr std::size_t kRecentRecords = 10;

// Student information store. Every mutation is appended to a JSON-lines event
// log (when one is attached) before it is applied; opening a store replays the
// log to rebuild the indexes. Writers are serialized; readers share a lock.
class SisStore {
 public:
  // In-memory only, standard taxonomy.
  SisStore();
  // Replays `log_path` if it exists and appends subsequent events to it.
  // Throws StoreLoadError on a corrupt log.
  explicit SisStore(std::filesystem::path log_path);

  SisStore(const SisStore&) = delete;
  SisStore& operator=(const SisStore&) = delete;

  void add_student(const Student& s);
  void add_teacher(const Teacher& t);
  void add_lesson(const Lesson& l);
  void set_taxonomy(const BehaviorTaxonomy& t);

  void register_device(const Udid& udid, const std::string& student_id);
  StudentView lookup_by_udid(const Udid& udid, std::size_t k = kRecentRecords) const;

  // Persists the record whatever its validation outcome, which is returned.
  ValidationOutcome write_record(const BehaviorRecord& record);

  // Ordered by capture_ts, then record_id. Throws malformed on from > to.
  std::vector<BehaviorRecord> query_records(const RecordFilter& filter) const;

  std::optional<Student> student(const std::string& id) const;
  std::optional<Teacher> teacher(const std::string& id) const;
  std::optional<std::string> student_for_udid(const Udid& udid) const;
  BehaviorTaxonomy taxonomy() const;
  std::size_t record_count() const;
  StoreSnapshot snapshot() const;

  const std::optional<std::filesystem::path>& log_path() const noexcept { return log_path_; }

 private:
  struct State {
    std::map<std::string, Student> students;
    std::map<std::string, Teacher> teachers;
    std::map<std::string, Lesson> lessons;
    BehaviorTaxonomy taxonomy = BehaviorTaxonomy::standard();
    std::vector<BehaviorRecord> records;
    std::unordered_set<std::string> record_ids;
    std::map<Udid, std::string> udid_index;
  };

  // Each apply_* validates against the state, throws ApiError on violation,
  // and returns false when the event is a no-op (idempotent replay).
  static bool apply_student(State& s, const Student& st, bool dry_run);
  static bool apply_teacher(State& s, const Teacher& t, bool dry_run);
  static bool apply_lesson(State& s, const Lesson& l, bool dry_run);
  static bool apply_device(State& s, const Udid& u, const std::string& student_id, bool dry_run);
  static bool apply_record(State& s, const BehaviorRecord& r, bool dry_run);

  void replay(const std::filesystem::path& path);
  void append(const std::string& kind, const std::string& payload_json);

  mutable std::shared_mutex mutex_;
  State state_;
  std::optional<std::filesystem::path> log_path_;
  std::ofstream log_;
};

}  // namespace proxiclass::sis
