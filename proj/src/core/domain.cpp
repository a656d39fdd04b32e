#include "proxiclass/core/domain.hpp"

#include <set>
#include <stdexcept>

namespace proxiclass {

BehaviorTaxonomy::BehaviorTaxonomy(std::vector<BehaviorCategory> categories)
    : categories_(std::move(categories)) {
  std::set<std::string_view> seen;
  bool has_positive = false;
  bool has_negative = false;
  for (const auto& c : categories_) {
    if (c.code.empty()) throw std::invalid_argument("taxonomy: empty category code");
    if (!seen.insert(c.code).second)
      throw std::invalid_argument("taxonomy: duplicate category code " + c.code);
    if (c.rating_domain.lo > c.rating_domain.hi)
      throw std::invalid_argument("taxonomy: empty rating domain for " + c.code);
    (c.valence == Valence::positive ? has_positive : has_negative) = true;
  }
  if (!has_positive || !has_negative)
    throw std::invalid_argument("taxonomy: needs at least one positive and one negative category");
}

BehaviorTaxonomy BehaviorTaxonomy::standard() {
  return BehaviorTaxonomy({
      {"RESPECT", "Respect", Valence::positive, {1, 3}},
      {"EFFORT", "Effort", Valence::positive, {1, 3}},
      {"KINDNESS", "Kindness", Valence::positive, {1, 3}},
      {"DISRUPT", "Disruption", Valence::negative, {1, 3}},
      {"OFFTASK", "Off task", Valence::negative, {1, 3}},
  });
}

const BehaviorCategory* BehaviorTaxonomy::find(std::string_view code) const noexcept {
  for (const auto& c : categories_)
    if (c.code == code) return &c;
  return nullptr;
}

std::string_view to_string(ValidationOutcome o) noexcept {
  switch (o) {
    case ValidationOutcome::valid: return "valid";
    case ValidationOutcome::unknown_category: return "unknown_category";
    case ValidationOutcome::rating_out_of_domain: return "rating_out_of_domain";
    case ValidationOutcome::timestamp_inverted: return "timestamp_inverted";
  }
  return "valid";
}

std::string_view to_string(Valence v) noexcept {
  return v == Valence::positive ? "positive" : "negative";
}

ValidationOutcome validate_record(const BehaviorRecord& record, const BehaviorTaxonomy& taxonomy) {
  const auto* category = taxonomy.find(record.category_code);
  if (category == nullptr) return ValidationOutcome::unknown_category;
  if (!category->rating_domain.contains(record.rating)) return ValidationOutcome::rating_out_of_domain;
  if (record.capture_ts < record.event_ts) return ValidationOutcome::timestamp_inverted;
  return ValidationOutcome::valid;
}

void check_student(const Student& s) {
  if (s.student_id.empty()) throw std::invalid_argument("student: empty student_id");
  if (s.year_level < kMinYearLevel || s.year_level > kMaxYearLevel)
    throw std::invalid_argument("student " + s.student_id + ": year_level " +
                                std::to_string(s.year_level) + " outside 5..12");
}

void check_lesson(const Lesson& l) {
  if (l.lesson_id.empty()) throw std::invalid_argument("lesson: empty lesson_id");
  if (!(l.start < l.end)) throw std::invalid_argument("lesson " + l.lesson_id + ": start must precede end");
  if (l.roster.empty()) throw std::invalid_argument("lesson " + l.lesson_id + ": empty roster");
}

}  // namespace proxiclass
