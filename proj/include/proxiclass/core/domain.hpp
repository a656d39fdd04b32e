#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proxiclass/core/time.hpp"
#include "proxiclass/core/udid.hpp"

namespace proxiclass {

inline constexpr int kMinYearLevel = 5;
inline constexpr int kMaxYearLevel = 12;

struct Student {
  std::string student_id;
  std::string name;
  int year_level = kMinYearLevel;
  std::optional<Udid> udid;

  friend bool operator==(const Student&, const Student&) = default;
};

struct Teacher {
  std::string teacher_id;
  std::string name;

  friend bool operator==(const Teacher&, const Teacher&) = default;
};

enum class Valence { positive, negative };

struct RatingDomain {
  int lo = 1;
  int hi = 3;

  bool contains(int r) const noexcept { return r >= lo && r <= hi; }
  double half_width() const noexcept { return (hi - lo) / 2.0; }
  friend bool operator==(const RatingDomain&, const RatingDomain&) = default;
};

struct BehaviorCategory {
  std::string code;
  std::string label;
  Valence valence = Valence::positive;
  RatingDomain rating_domain;

  friend bool operator==(const BehaviorCategory&, const BehaviorCategory&) = default;
};

class BehaviorTaxonomy {
 public:
  // Throws std::invalid_argument on duplicate codes, empty rating domains, or
  // a taxonomy lacking either valence.
  explicit BehaviorTaxonomy(std::vector<BehaviorCategory> categories);

  // Five categories (three positive, two negative) on [1,3].
  static BehaviorTaxonomy standard();

  const BehaviorCategory* find(std::string_view code) const noexcept;
  const std::vector<BehaviorCategory>& categories() const noexcept { return categories_; }

  friend bool operator==(const BehaviorTaxonomy&, const BehaviorTaxonomy&) = default;

 private:
  std::vector<BehaviorCategory> categories_;
};

struct Lesson {
  std::string lesson_id;
  std::string teacher_id;
  std::vector<std::string> roster;
  Timestamp start;
  Timestamp end;

  friend bool operator==(const Lesson&, const Lesson&) = default;
};

// category_code and rating are deliberately unchecked here: defective values
// must be storable so that accuracy can be measured.
struct BehaviorRecord {
  std::string record_id;
  std::string student_id;
  std::string teacher_id;
  std::string lesson_id;
  std::string category_code;
  int rating = 0;
  std::optional<std::string> comment;
  Timestamp event_ts;
  Timestamp capture_ts;

  double capture_latency_s() const { return seconds_between(event_ts, capture_ts); }
  friend bool operator==(const BehaviorRecord&, const BehaviorRecord&) = default;
};

enum class ValidationOutcome { valid, unknown_category, rating_out_of_domain, timestamp_inverted };

std::string_view to_string(ValidationOutcome o) noexcept;
std::string_view to_string(Valence v) noexcept;

// Checks category, then rating, then timestamps; reports the first failure.
ValidationOutcome validate_record(const BehaviorRecord& record, const BehaviorTaxonomy& taxonomy);

// Throws std::invalid_argument when a type invariant is violated.
void check_student(const Student& s);
void check_lesson(const Lesson& l);

}  // namespace proxiclass
