#pragma once

#include <span>
#include <string>
#include <vector>

#include "proxiclass/core/domain.hpp"
#include "proxiclass/core/json.hpp"

namespace proxiclass::quality {

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kSecondsPerWeek = 7 * kSecondsPerDay;

struct QualityConfig {
  double timeliness_threshold_s = 300.0;
  // BehaviorRecord field names; "populated" means present and non-empty.
  std::vector<std::string> required_attributes{"category_code", "rating", "lesson_id", "comment"};
  double consistency_window_s = kSecondsPerWeek;

  void validate() const;  // throws std::invalid_argument
};

struct QualityReport {
  double accuracy = 1.0;
  double timeliness = 1.0;
  double mean_capture_latency_s = 0.0;
  double consistency = 1.0;
  double completeness = 1.0;
  double roster_coverage = 0.0;
  std::size_t n_records = 0;

  friend bool operator==(const QualityReport&, const QualityReport&) = default;
};

// Fraction of records that validate; 1.0 for an empty set.
double accuracy(std::span<const BehaviorRecord> records, const BehaviorTaxonomy& taxonomy);

struct TimelinessScore {
  double score = 1.0;
  double mean_latency_s = 0.0;
};

// Latency is capture_ts - event_ts, floored at zero; the threshold is inclusive.
TimelinessScore timeliness(std::span<const BehaviorRecord> records, const QualityConfig& cfg);

// 1 - (population stddev / half-width of the domain), clamped to [0,1]. A
// degenerate domain scores 1 only when every rating agrees.
double agreement_score(std::span<const int> ratings, const RatingDomain& domain);

struct ConsistencyScore {
  double rating_agreement = 1.0;
  double cadence_stability = 1.0;
  double score = 1.0;
};

// Rating agreement: records are bucketed into consecutive windows of
// consistency_window_s anchored at the earliest event; every (student,
// category, window) group rated by at least two distinct teachers contributes
// its agreement_score. Categories unknown to the taxonomy are skipped.
//
// Cadence stability: per student, record counts over consecutive 7-day weeks
// spanning the dataset; each student scores 1/(1 + CV). Needs >= 2 weeks.
//
// A sub-score with no eligible input is 1.0; the score is their mean.
ConsistencyScore consistency_breakdown(std::span<const BehaviorRecord> records,
                                       const BehaviorTaxonomy& taxonomy, const QualityConfig& cfg);

inline double consistency(std::span<const BehaviorRecord> records, const BehaviorTaxonomy& taxonomy,
                          const QualityConfig& cfg) {
  return consistency_breakdown(records, taxonomy, cfg).score;
}

struct CompletenessScore {
  double attr_score = 1.0;
  double roster_coverage = 0.0;
};

CompletenessScore completeness(std::span<const BehaviorRecord> records,
                               std::span<const std::string> roster, const QualityConfig& cfg);

// Whether `attribute` is populated on `record`. Throws std::invalid_argument
// for names that are not BehaviorRecord fields.
bool attribute_populated(const BehaviorRecord& record, std::string_view attribute);

QualityReport quality_report(std::span<const BehaviorRecord> records, const BehaviorTaxonomy& taxonomy,
                             std::span<const std::string> roster, const QualityConfig& cfg);

// Mean of the four dimension scores.
double quality_index(const QualityReport& r) noexcept;

struct QualityComparison {
  // new - legacy
  double accuracy = 0.0;
  double timeliness = 0.0;
  double consistency = 0.0;
  double completeness = 0.0;
  double mean_capture_latency_s = 0.0;
  double roster_coverage = 0.0;
  // new >= legacy on all four dimensions
  bool dominance = true;
};

QualityComparison compare(const QualityReport& legacy, const QualityReport& fresh);

void to_json(json& j, const QualityReport& r);
void from_json(const json& j, QualityReport& r);
void to_json(json& j, const QualityConfig& c);
void from_json(const json& j, QualityConfig& c);
void to_json(json& j, const QualityComparison& c);

}  // namespace proxiclass::quality
