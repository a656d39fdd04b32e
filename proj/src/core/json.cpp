#include "proxiclass/core/json.hpp"

#include <stdexcept>

namespace proxiclass {

json timestamp_to_json(Timestamp ts) { return format_rfc3339(ts); }

Timestamp timestamp_from_json(const json& j) { return parse_rfc3339(j.get<std::string>()); }

void to_json(json& j, const Udid& u) { j = u.str(); }

void from_json(const json& j, Udid& u) { u = Udid::parse(j.get<std::string>()); }

void to_json(json& j, const Student& s) {
  j = json{{"student_id", s.student_id},
           {"name", s.name},
           {"year_level", s.year_level},
           {"udid", s.udid ? json(s.udid->str()) : json(nullptr)}};
}

void from_json(const json& j, Student& s) {
  s.student_id = j.at("student_id").get<std::string>();
  s.name = j.value("name", std::string{});
  s.year_level = j.at("year_level").get<int>();
  s.udid.reset();
  if (auto it = j.find("udid"); it != j.end() && !it->is_null()) s.udid = it->get<Udid>();
  check_student(s);
}

void to_json(json& j, const Teacher& t) {
  j = json{{"teacher_id", t.teacher_id}, {"name", t.name}};
}

void from_json(const json& j, Teacher& t) {
  t.teacher_id = j.at("teacher_id").get<std::string>();
  t.name = j.value("name", std::string{});
  if (t.teacher_id.empty()) throw std::invalid_argument("teacher: empty teacher_id");
}

void to_json(json& j, const BehaviorCategory& c) {
  j = json{{"code", c.code},
           {"label", c.label},
           {"valence", std::string(to_string(c.valence))},
           {"rating_domain", json::array({c.rating_domain.lo, c.rating_domain.hi})}};
}

void from_json(const json& j, BehaviorCategory& c) {
  c.code = j.at("code").get<std::string>();
  c.label = j.value("label", c.code);
  const auto valence = j.at("valence").get<std::string>();
  if (valence == "positive") {
    c.valence = Valence::positive;
  } else if (valence == "negative") {
    c.valence = Valence::negative;
  } else {
    throw std::invalid_argument("category " + c.code + ": valence must be positive|negative");
  }
  c.rating_domain = RatingDomain{};
  if (auto it = j.find("rating_domain"); it != j.end()) {
    if (!it->is_array() || it->size() != 2)
      throw std::invalid_argument("category " + c.code + ": rating_domain must be [lo, hi]");
    c.rating_domain = RatingDomain{(*it)[0].get<int>(), (*it)[1].get<int>()};
  }
}

void to_json(json& j, const BehaviorTaxonomy& t) { j = json{{"categories", t.categories()}}; }

BehaviorTaxonomy taxonomy_from_json(const json& j) {
  return BehaviorTaxonomy(j.at("categories").get<std::vector<BehaviorCategory>>());
}

void to_json(json& j, const Lesson& l) {
  j = json{{"lesson_id", l.lesson_id},
           {"teacher_id", l.teacher_id},
           {"roster", l.roster},
           {"start", format_rfc3339(l.start)},
           {"end", format_rfc3339(l.end)}};
}

void from_json(const json& j, Lesson& l) {
  l.lesson_id = j.at("lesson_id").get<std::string>();
  l.teacher_id = j.at("teacher_id").get<std::string>();
  l.roster = j.at("roster").get<std::vector<std::string>>();
  l.start = timestamp_from_json(j.at("start"));
  l.end = timestamp_from_json(j.at("end"));
  check_lesson(l);
}

void to_json(json& j, const BehaviorRecord& r) {
  j = json{{"record_id", r.record_id},
           {"student_id", r.student_id},
           {"teacher_id", r.teacher_id},
           {"lesson_id", r.lesson_id},
           {"category_code", r.category_code},
           {"rating", r.rating},
           {"comment", r.comment ? json(*r.comment) : json(nullptr)},
           {"event_ts", format_rfc3339(r.event_ts)},
           {"capture_ts", format_rfc3339(r.capture_ts)}};
}

void from_json(const json& j, BehaviorRecord& r) {
  r.record_id = j.at("record_id").get<std::string>();
  if (r.record_id.empty()) throw std::invalid_argument("record: empty record_id");
  r.student_id = j.at("student_id").get<std::string>();
  r.teacher_id = j.at("teacher_id").get<std::string>();
  r.lesson_id = j.value("lesson_id", std::string{});
  r.category_code = j.value("category_code", std::string{});
  r.rating = j.at("rating").get<int>();
  r.comment.reset();
  if (auto it = j.find("comment"); it != j.end() && !it->is_null()) r.comment = it->get<std::string>();
  r.event_ts = timestamp_from_json(j.at("event_ts"));
  r.capture_ts = timestamp_from_json(j.at("capture_ts"));
}

}  // namespace proxiclass
