#include "proxiclass/sim/config.hpp"

#include <cstdio>

namespace proxiclass::sim {

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::string msg = "invalid configuration:";
  for (const auto& e : errors) msg += "\n  - " + e;
  return msg;
}

// Reads j[section][key] into `out` when present, recording type errors.
class Reader {
 public:
  Reader(const json& root, std::vector<std::string>& errors) : root_(root), errors_(errors) {}

  template <typename T>
  void get(const char* section, const char* key, T& out) {
    const json* node = &root_;
    std::string path = key;
    if (section != nullptr) {
      auto it = root_.find(section);
      if (it == root_.end()) return;
      if (!it->is_object()) {
        note(std::string(section) + " must be an object");
        return;
      }
      node = &*it;
      path = std::string(section) + "." + key;
    }
    auto it = node->find(key);
    if (it == node->end()) return;
    try {
      out = it->get<T>();
    } catch (const std::exception&) {
      note(path + " has the wrong type");
    }
  }

  void note(std::string msg) {
    for (const auto& e : errors_)
      if (e == msg) return;
    errors_.push_back(std::move(msg));
  }

 private:
  const json& root_;
  std::vector<std::string>& errors_;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

SimConfig default_sim_config() { return SimConfig{}; }

SimConfig sim_config_from_json(const json& j) {
  std::vector<std::string> errors;
  if (!j.is_object()) throw ConfigError({"configuration must be a JSON object"});
  Reader r(j, errors);
  SimConfig c;

  r.get(nullptr, "sessions", c.sessions);
  std::uint64_t seed = c.setup.session.rng_seed;
  r.get(nullptr, "seed", seed);

  r.get("classroom", "students", c.classroom.students);
  r.get("classroom", "columns", c.classroom.columns);
  r.get("classroom", "spacing_x_m", c.classroom.spacing_x_m);
  r.get("classroom", "spacing_y_m", c.classroom.spacing_y_m);
  r.get("classroom", "margin_m", c.classroom.margin_m);

  auto& s = c.setup.session;
  r.get("session", "duration_s", s.duration_s);
  r.get("session", "teaching_fraction", s.teaching_fraction);
  r.get("session", "event_rate_per_student_per_session", s.event_rate_per_student_per_session);
  r.get("session", "scan_interval_s", s.scan_interval_s);
  if (auto it = j.find("session"); it != j.end() && it->is_object() && it->contains("patrol")) {
    Reader pr(*it, errors);
    pr.get("patrol", "walk_speed_mps", s.patrol.walk_speed_mps);
    pr.get("patrol", "dwell_s", s.patrol.dwell_s);
    pr.get("patrol", "stand_off_m", s.patrol.stand_off_m);
  }

  auto& im = c.setup.interaction;
  r.get("interaction", "legacy_steps_per_record", im.legacy_steps_per_record);
  r.get("interaction", "proximity_steps_per_record", im.proximity_steps_per_record);
  r.get("interaction", "seconds_per_step", im.seconds_per_step);

  auto& pl = c.setup.path_loss;
  r.get("path_loss", "tx_power_dbm_at_1m", pl.tx_power_dbm_at_1m);
  r.get("path_loss", "exponent", pl.exponent);
  r.get("path_loss", "noise_sigma_db", pl.noise_sigma_db);

  auto& sc = c.setup.scanner;
  r.get("scanner", "ewma_alpha", sc.ewma_alpha);
  r.get("scanner", "stale_after_s", sc.stale_after_s);
  r.get("scanner", "hysteresis_db", sc.hysteresis_db);
  r.get("scanner", "confirm_scans", sc.confirm_scans);

  r.get("term", "teachers", c.term.n_teachers);
  r.get("term", "days_between_sessions", c.term.days_between_sessions);
  std::string start;
  r.get("term", "start", start);
  if (!start.empty()) {
    try {
      c.term.term_start = parse_rfc3339(start);
    } catch (const std::exception& e) {
      r.note(std::string("term.start: ") + e.what());
    }
  }

  r.get("quality", "timeliness_threshold_s", c.quality.timeliness_threshold_s);
  r.get("quality", "required_attributes", c.quality.required_attributes);
  r.get("quality", "consistency_window_s", c.quality.consistency_window_s);

  r.get("defects", "missing_comment", c.defects.missing_comment);
  r.get("defects", "invalid_code", c.defects.invalid_code);
  r.get("defects", "late_capture", c.defects.late_capture);
  r.get("defects", "late_delay_min_s", c.defects.late_delay_min_s);
  r.get("defects", "late_delay_max_s", c.defects.late_delay_max_s);

  if (j.contains("taxonomy")) {
    try {
      c.setup.taxonomy = taxonomy_from_json(j.at("taxonomy"));
    } catch (const std::exception& e) {
      r.note(std::string("taxonomy: ") + e.what());
    }
  }

  if (c.sessions < 1) r.note("sessions must be >= 1");
  if (c.term.n_teachers < 1) r.note("term.teachers must be >= 1");
  if (!(c.term.days_between_sessions >= 0.0)) r.note("term.days_between_sessions must be >= 0");
  if (c.classroom.students < 1) r.note("classroom.students must be >= 1");
  if (c.classroom.columns < 1) r.note("classroom.columns must be >= 1");
  if (!(c.classroom.spacing_x_m > 0.0)) r.note("classroom.spacing_x_m must be > 0");
  if (!(c.classroom.spacing_y_m > 0.0)) r.note("classroom.spacing_y_m must be > 0");
  if (!(c.classroom.margin_m > 0.0)) r.note("classroom.margin_m must be > 0");
  try {
    c.quality.validate();
  } catch (const std::exception& e) {
    r.note(e.what());
  }
  try {
    c.defects.validate();
  } catch (const std::exception& e) {
    r.note(e.what());
  }

  if (c.classroom.students >= 1 && c.classroom.columns >= 1 && c.classroom.spacing_x_m > 0.0 &&
      c.classroom.spacing_y_m > 0.0 && c.classroom.margin_m > 0.0) {
    const auto fresh = default_setup(static_cast<std::size_t>(c.classroom.students));
    c.setup.roster = fresh.roster;
    std::vector<std::string> ids;
    for (const auto& st : c.setup.roster) ids.push_back(st.student_id);
    c.setup.layout = ClassroomLayout::grid(ids, c.classroom.columns, c.classroom.spacing_x_m,
                                           c.classroom.spacing_y_m, c.classroom.margin_m);
  }
  c.setup.session.rng_seed = seed;
  for (auto& e : c.setup.errors()) r.note(std::move(e));

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

json sim_config_to_json(const SimConfig& c) {
  const auto& s = c.setup.session;
  const auto& im = c.setup.interaction;
  const auto& pl = c.setup.path_loss;
  const auto& sc = c.setup.scanner;
  return json{
      {"seed", s.rng_seed},
      {"sessions", c.sessions},
      {"classroom",
       {{"students", c.classroom.students},
        {"columns", c.classroom.columns},
        {"spacing_x_m", c.classroom.spacing_x_m},
        {"spacing_y_m", c.classroom.spacing_y_m},
        {"margin_m", c.classroom.margin_m}}},
      {"session",
       {{"duration_s", s.duration_s},
        {"teaching_fraction", s.teaching_fraction},
        {"event_rate_per_student_per_session", s.event_rate_per_student_per_session},
        {"scan_interval_s", s.scan_interval_s},
        {"patrol",
         {{"walk_speed_mps", s.patrol.walk_speed_mps},
          {"dwell_s", s.patrol.dwell_s},
          {"stand_off_m", s.patrol.stand_off_m}}}}},
      {"interaction",
       {{"legacy_steps_per_record", im.legacy_steps_per_record},
        {"proximity_steps_per_record", im.proximity_steps_per_record},
        {"seconds_per_step", im.seconds_per_step}}},
      {"path_loss",
       {{"tx_power_dbm_at_1m", pl.tx_power_dbm_at_1m},
        {"exponent", pl.exponent},
        {"noise_sigma_db", pl.noise_sigma_db}}},
      {"scanner",
       {{"ewma_alpha", sc.ewma_alpha},
        {"stale_after_s", sc.stale_after_s},
        {"hysteresis_db", sc.hysteresis_db},
        {"confirm_scans", sc.confirm_scans}}},
      {"term",
       {{"teachers", c.term.n_teachers},
        {"start", format_rfc3339(c.term.term_start)},
        {"days_between_sessions", c.term.days_between_sessions}}},
      {"quality", c.quality},
      {"defects",
       {{"missing_comment", c.defects.missing_comment},
        {"invalid_code", c.defects.invalid_code},
        {"late_capture", c.defects.late_capture},
        {"late_delay_min_s", c.defects.late_delay_min_s},
        {"late_delay_max_s", c.defects.late_delay_max_s}}},
      {"taxonomy", c.setup.taxonomy}};
}

}  // namespace proxiclass::sim
