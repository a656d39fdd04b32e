#pragma once

#include <span>
#include <string>
#include <vector>

#include "proxiclass/core/domain.hpp"
#include "proxiclass/core/json.hpp"
#include "proxiclass/quality/quality.hpp"

namespace proxiclass::reports {

struct BestPracticePolicy {
  // 4:1 positive-to-negative feedback.
  double target_positive_ratio = 0.8;
  int min_records_per_lesson = 3;
  double max_feedback_latency_s = 300.0;

  void validate() const;  // throws std::invalid_argument
};

struct TeacherAlignment {
  std::string teacher_id;
  double positive_ratio = 1.0;
  double cadence_score = 1.0;
  double latency_score = 1.0;
  double alignment = 1.0;
  double peer_percentile = 1.0;
};

// Component scores and their mean for one teacher; peer_percentile is left at
// 1.0. `records` and `lessons` must already be restricted to that teacher.
TeacherAlignment alignment_components(std::string teacher_id, std::span<const BehaviorRecord> records,
                                      std::span<const Lesson> lessons, const BehaviorTaxonomy& taxonomy,
                                      const BestPracticePolicy& policy);

// Mid-rank of `alignment` among `peers` (which include the teacher itself),
// scaled by (peers - 1). 1.0 when there is no other peer.
double peer_percentile(double alignment, std::span<const double> peers);

TeacherAlignment teacher_alignment(std::string teacher_id, std::span<const BehaviorRecord> records,
                                   std::span<const Lesson> lessons, const BehaviorTaxonomy& taxonomy,
                                   const BestPracticePolicy& policy, std::span<const double> peers);

// One entry per teacher that owns at least one lesson, ordered by teacher_id,
// with peer percentiles filled in.
std::vector<TeacherAlignment> all_teacher_alignments(std::span<const BehaviorRecord> records,
                                                     std::span<const Lesson> lessons,
                                                     const BehaviorTaxonomy& taxonomy,
                                                     const BestPracticePolicy& policy);

struct CategoryAgreement {
  std::string category_code;
  double agreement = 1.0;
  std::size_t n_ratings = 0;
  std::size_t n_teachers = 0;
};

// Per-category agreement for one student over records with event_ts in
// [from, to]; only categories rated by two or more teachers are listed.
std::vector<CategoryAgreement> cross_teacher_consistency(std::span<const BehaviorRecord> records,
                                                         std::string_view student_id,
                                                         const BehaviorTaxonomy& taxonomy,
                                                         Timestamp from, Timestamp to);

struct SchoolKpi {
  double mean_alignment = 1.0;
  double quality_index = 1.0;
  double coverage = 0.0;
  double kpi = 0.0;
};

SchoolKpi school_kpi(std::span<const BehaviorRecord> records, const BehaviorTaxonomy& taxonomy,
                     std::span<const std::string> roster, std::span<const Lesson> lessons,
                     const BestPracticePolicy& policy, const quality::QualityConfig& cfg);

struct SeriesPoint {
  Timestamp bucket_start;
  double value = 0.0;
};

// Weekly buckets [from + 7k days, from + 7(k+1) days) covering [from, to].
// Records are bucketed by event_ts and lessons by start.
std::vector<SeriesPoint> teacher_alignment_series(std::string_view teacher_id,
                                                  std::span<const BehaviorRecord> records,
                                                  std::span<const Lesson> lessons,
                                                  const BehaviorTaxonomy& taxonomy,
                                                  const BestPracticePolicy& policy, Timestamp from,
                                                  Timestamp to);

std::vector<SeriesPoint> school_kpi_series(std::span<const BehaviorRecord> records,
                                           const BehaviorTaxonomy& taxonomy,
                                           std::span<const std::string> roster,
                                           std::span<const Lesson> lessons,
                                           const BestPracticePolicy& policy,
                                           const quality::QualityConfig& cfg, Timestamp from,
                                           Timestamp to);

void to_json(json& j, const BestPracticePolicy& p);
void from_json(const json& j, BestPracticePolicy& p);
void to_json(json& j, const TeacherAlignment& a);
void to_json(json& j, const CategoryAgreement& c);
void to_json(json& j, const SchoolKpi& k);
void to_json(json& j, const SeriesPoint& p);

}  // namespace proxiclass::reports
