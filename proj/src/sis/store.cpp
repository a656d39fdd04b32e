#include "proxiclass/sis/store.hpp"

#include <algorithm>
#include <mutex>

#include "proxiclass/core/json.hpp"

namespace proxiclass::sis {

std::string_view to_string(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::malformed: return "malformed";
    case ErrorCode::validation_warning: return "validation_warning";
  }
  return "malformed";
}

std::vector<std::string> StoreSnapshot::roster() const {
  std::vector<std::string> ids;
  ids.reserve(students.size());
  for (const auto& s : students) ids.push_back(s.student_id);
  return ids;
}

SisStore::SisStore() = default;

SisStore::SisStore(std::filesystem::path log_path) : log_path_(log_path) {
  if (std::filesystem::exists(log_path)) replay(log_path);
  log_.open(log_path, std::ios::app);
  if (!log_) throw std::runtime_error("cannot open store log for append: " + log_path.string());
}

void SisStore::replay(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StoreLoadError("cannot read store " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto event = json::parse(line);
      const auto kind = event.at("kind").get<std::string>();
      const auto& data = event.at("data");
      if (kind == "student") {
        apply_student(state_, data.get<Student>(), false);
      } else if (kind == "teacher") {
        apply_teacher(state_, data.get<Teacher>(), false);
      } else if (kind == "lesson") {
        apply_lesson(state_, data.get<Lesson>(), false);
      } else if (kind == "taxonomy") {
        state_.taxonomy = taxonomy_from_json(data);
      } else if (kind == "device") {
        apply_device(state_, Udid::parse(data.at("udid").get<std::string>()),
                     data.at("student_id").get<std::string>(), false);
      } else if (kind == "record") {
        apply_record(state_, data.get<BehaviorRecord>(), false);
      } else {
        throw std::invalid_argument("unknown event kind \"" + kind + "\"");
      }
    } catch (const std::exception& e) {
      throw StoreLoadError("corrupt store " + path.string() + " line " + std::to_string(line_no) +
                           ": " + e.what());
    }
  }
}

void SisStore::append(const std::string& kind, const std::string& payload_json) {
  if (!log_path_) return;
  log_ << R"({"kind":")" << kind << R"(","data":)" << payload_json << "}\n";
  log_.flush();
  if (!log_) throw std::runtime_error("failed to append to store log " + log_path_->string());
}

bool SisStore::apply_student(State& s, const Student& st, bool dry_run) {
  if (auto it = s.students.find(st.student_id); it != s.students.end()) {
    if (it->second == st) return false;
    throw ApiError(ErrorCode::conflict, "student " + st.student_id + " already exists");
  }
  if (st.udid) {
    if (auto it = s.udid_index.find(*st.udid); it != s.udid_index.end())
      throw ApiError(ErrorCode::conflict, "udid " + st.udid->str() + " bound to " + it->second);
  }
  if (dry_run) return true;
  s.students.emplace(st.student_id, st);
  if (st.udid) s.udid_index.emplace(*st.udid, st.student_id);
  return true;
}

bool SisStore::apply_teacher(State& s, const Teacher& t, bool dry_run) {
  if (auto it = s.teachers.find(t.teacher_id); it != s.teachers.end()) {
    if (it->second == t) return false;
    throw ApiError(ErrorCode::conflict, "teacher " + t.teacher_id + " already exists");
  }
  if (!dry_run) s.teachers.emplace(t.teacher_id, t);
  return true;
}

bool SisStore::apply_lesson(State& s, const Lesson& l, bool dry_run) {
  if (auto it = s.lessons.find(l.lesson_id); it != s.lessons.end()) {
    if (it->second == l) return false;
    throw ApiError(ErrorCode::conflict, "lesson " + l.lesson_id + " already exists");
  }
  if (!s.teachers.contains(l.teacher_id))
    throw ApiError(ErrorCode::not_found, "lesson " + l.lesson_id + ": unknown teacher " + l.teacher_id);
  for (const auto& id : l.roster)
    if (!s.students.contains(id))
      throw ApiError(ErrorCode::not_found, "lesson " + l.lesson_id + ": unknown student " + id);
  if (!dry_run) s.lessons.emplace(l.lesson_id, l);
  return true;
}

bool SisStore::apply_device(State& s, const Udid& u, const std::string& student_id, bool dry_run) {
  auto student = s.students.find(student_id);
  if (student == s.students.end())
    throw ApiError(ErrorCode::not_found, "unknown student " + student_id);
  if (auto it = s.udid_index.find(u); it != s.udid_index.end()) {
    if (it->second == student_id) return false;
    throw ApiError(ErrorCode::conflict, "udid " + u.str() + " already bound to student " + it->second);
  }
  if (student->second.udid && *student->second.udid != u)
    throw ApiError(ErrorCode::conflict,
                   "student " + student_id + " already bound to udid " + student->second.udid->str());
  if (dry_run) return true;
  s.udid_index.emplace(u, student_id);
  student->second.udid = u;
  return true;
}

bool SisStore::apply_record(State& s, const BehaviorRecord& r, bool dry_run) {
  if (s.record_ids.contains(r.record_id))
    throw ApiError(ErrorCode::conflict, "duplicate record_id " + r.record_id);
  if (!s.students.contains(r.student_id))
    throw ApiError(ErrorCode::not_found, "unknown student " + r.student_id);
  if (!s.teachers.contains(r.teacher_id))
    throw ApiError(ErrorCode::not_found, "unknown teacher " + r.teacher_id);
  if (!r.lesson_id.empty() && !s.lessons.contains(r.lesson_id))
    throw ApiError(ErrorCode::not_found, "unknown lesson " + r.lesson_id);
  if (dry_run) return true;
  s.records.push_back(r);
  s.record_ids.insert(r.record_id);
  return true;
}

void SisStore::add_student(const Student& s) {
  try {
    check_student(s);
  } catch (const std::invalid_argument& e) {
    throw ApiError(ErrorCode::malformed, e.what());
  }
  std::unique_lock lock(mutex_);
  if (!apply_student(state_, s, true)) return;
  append("student", json(s).dump());
  apply_student(state_, s, false);
}

void SisStore::add_teacher(const Teacher& t) {
  if (t.teacher_id.empty()) throw ApiError(ErrorCode::malformed, "teacher: empty teacher_id");
  std::unique_lock lock(mutex_);
  if (!apply_teacher(state_, t, true)) return;
  append("teacher", json(t).dump());
  apply_teacher(state_, t, false);
}

void SisStore::add_lesson(const Lesson& l) {
  try {
    check_lesson(l);
  } catch (const std::invalid_argument& e) {
    throw ApiError(ErrorCode::malformed, e.what());
  }
  std::unique_lock lock(mutex_);
  if (!apply_lesson(state_, l, true)) return;
  append("lesson", json(l).dump());
  apply_lesson(state_, l, false);
}

void SisStore::set_taxonomy(const BehaviorTaxonomy& t) {
  std::unique_lock lock(mutex_);
  append("taxonomy", json(t).dump());
  state_.taxonomy = t;
}

void SisStore::register_device(const Udid& udid, const std::string& student_id) {
  std::unique_lock lock(mutex_);
  if (!apply_device(state_, udid, student_id, true)) return;
  append("device", json{{"udid", udid.str()}, {"student_id", student_id}}.dump());
  apply_device(state_, udid, student_id, false);
}

StudentView SisStore::lookup_by_udid(const Udid& udid, std::size_t k) const {
  std::shared_lock lock(mutex_);
  auto it = state_.udid_index.find(udid);
  if (it == state_.udid_index.end())
    throw ApiError(ErrorCode::not_found, "no student registered for udid " + udid.str());
  StudentView view{state_.students.at(it->second), {}};
  for (const auto& r : state_.records)
    if (r.student_id == it->second) view.recent_records.push_back(r);
  std::sort(view.recent_records.begin(), view.recent_records.end(),
            [](const BehaviorRecord& a, const BehaviorRecord& b) {
              if (a.capture_ts != b.capture_ts) return a.capture_ts > b.capture_ts;
              return a.record_id < b.record_id;
            });
  if (view.recent_records.size() > k) view.recent_records.resize(k);
  return view;
}

ValidationOutcome SisStore::write_record(const BehaviorRecord& record) {
  if (record.record_id.empty()) throw ApiError(ErrorCode::malformed, "record: empty record_id");
  std::unique_lock lock(mutex_);
  apply_record(state_, record, true);
  append("record", json(record).dump());
  apply_record(state_, record, false);
  return validate_record(record, state_.taxonomy);
}

std::vector<BehaviorRecord> SisStore::query_records(const RecordFilter& f) const {
  if (f.from && f.to && *f.to < *f.from)
    throw ApiError(ErrorCode::malformed, "inverted time range: from > to");
  std::vector<BehaviorRecord> out;
  {
    std::shared_lock lock(mutex_);
    for (const auto& r : state_.records) {
      if (f.student_id && r.student_id != *f.student_id) continue;
      if (f.teacher_id && r.teacher_id != *f.teacher_id) continue;
      if (f.lesson_id && r.lesson_id != *f.lesson_id) continue;
      if (f.from && r.event_ts < *f.from) continue;
      if (f.to && r.event_ts > *f.to) continue;
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end(), [](const BehaviorRecord& a, const BehaviorRecord& b) {
    if (a.capture_ts != b.capture_ts) return a.capture_ts < b.capture_ts;
    return a.record_id < b.record_id;
  });
  return out;
}

std::optional<Student> SisStore::student(const std::string& id) const {
  std::shared_lock lock(mutex_);
  if (auto it = state_.students.find(id); it != state_.students.end()) return it->second;
  return std::nullopt;
}

std::optional<Teacher> SisStore::teacher(const std::string& id) const {
  std::shared_lock lock(mutex_);
  if (auto it = state_.teachers.find(id); it != state_.teachers.end()) return it->second;
  return std::nullopt;
}

std::optional<std::string> SisStore::student_for_udid(const Udid& udid) const {
  std::shared_lock lock(mutex_);
  if (auto it = state_.udid_index.find(udid); it != state_.udid_index.end()) return it->second;
  return std::nullopt;
}

BehaviorTaxonomy SisStore::taxonomy() const {
  std::shared_lock lock(mutex_);
  return state_.taxonomy;
}

std::size_t SisStore::record_count() const {
  std::shared_lock lock(mutex_);
  return state_.records.size();
}

StoreSnapshot SisStore::snapshot() const {
  std::shared_lock lock(mutex_);
  StoreSnapshot snap;
  for (const auto& [id, s] : state_.students) snap.students.push_back(s);
  for (const auto& [id, t] : state_.teachers) snap.teachers.push_back(t);
  for (const auto& [id, l] : state_.lessons) snap.lessons.push_back(l);
  snap.records = state_.records;
  snap.taxonomy = state_.taxonomy;
  return snap;
}

}  // namespace proxiclass::sis
