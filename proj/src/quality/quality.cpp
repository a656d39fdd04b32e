#include "proxiclass/quality/quality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace proxiclass::quality {

namespace {

constexpr std::string_view kRecordFields[] = {"record_id",     "student_id", "teacher_id",
                                              "lesson_id",     "category_code", "rating",
                                              "comment",       "event_ts",   "capture_ts"};

double mean(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double population_stddev(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace

void QualityConfig::validate() const {
  if (!(timeliness_threshold_s > 0.0)) throw std::invalid_argument("quality: timeliness_threshold_s must be > 0");
  if (required_attributes.empty()) throw std::invalid_argument("quality: required_attributes must be non-empty");
  if (!(consistency_window_s > 0.0)) throw std::invalid_argument("quality: consistency_window_s must be > 0");
  for (const auto& a : required_attributes) {
    if (std::find(std::begin(kRecordFields), std::end(kRecordFields), a) == std::end(kRecordFields))
      throw std::invalid_argument("quality: unknown required attribute \"" + a + "\"");
  }
}

double accuracy(std::span<const BehaviorRecord> records, const BehaviorTaxonomy& taxonomy) {
  if (records.empty()) return 1.0;
  const auto valid = std::count_if(records.begin(), records.end(), [&](const BehaviorRecord& r) {
    return validate_record(r, taxonomy) == ValidationOutcome::valid;
  });
  return static_cast<double>(valid) / static_cast<double>(records.size());
}

TimelinessScore timeliness(std::span<const BehaviorRecord> records, const QualityConfig& cfg) {
  if (records.empty()) return {};
  std::size_t on_time = 0;
  double total = 0.0;
  for (const auto& r : records) {
    const double latency = std::max(0.0, r.capture_latency_s());
    if (latency <= cfg.timeliness_threshold_s) ++on_time;
    total += latency;
  }
  const auto n = static_cast<double>(records.size());
  return {static_cast<double>(on_time) / n, total / n};
}

double agreement_score(std::span<const int> ratings, const RatingDomain& domain) {
  if (ratings.empty()) return 1.0;
  std::vector<double> xs(ratings.begin(), ratings.end());
  const double sd = population_stddev(xs);
  const double hw = domain.half_width();
  if (hw <= 0.0) return sd == 0.0 ? 1.0 : 0.0;
  return std::clamp(1.0 - sd / hw, 0.0, 1.0);
}

ConsistencyScore consistency_breakdown(std::span<const BehaviorRecord> records,
                                       const BehaviorTaxonomy& taxonomy, const QualityConfig& cfg) {
  ConsistencyScore out;
  if (records.empty()) return out;

  const auto [first, last] = std::minmax_element(
      records.begin(), records.end(),
      [](const BehaviorRecord& a, const BehaviorRecord& b) { return a.event_ts < b.event_ts; });
  const Timestamp anchor = first->event_ts;
  const double span_s = seconds_between(anchor, last->event_ts);

  struct Group {
    std::vector<int> ratings;
    std::set<std::string> teachers;
    const BehaviorCategory* category = nullptr;
  };
  std::map<std::tuple<std::string, std::string, long long>, Group> groups;
  std::map<std::string, std::vector<double>> weekly;
  const auto n_weeks = static_cast<std::size_t>(std::floor(span_s / kSecondsPerWeek)) + 1;

  for (const auto& r : records) {
    const double offset = seconds_between(anchor, r.event_ts);
    if (const auto* cat = taxonomy.find(r.category_code)) {
      const auto window = static_cast<long long>(std::floor(offset / cfg.consistency_window_s));
      auto& g = groups[{r.student_id, r.category_code, window}];
      g.ratings.push_back(r.rating);
      g.teachers.insert(r.teacher_id);
      g.category = cat;
    }
    auto& counts = weekly[r.student_id];
    if (counts.empty()) counts.assign(n_weeks, 0.0);
    counts[static_cast<std::size_t>(std::floor(offset / kSecondsPerWeek))] += 1.0;
  }

  std::vector<double> agreements;
  for (const auto& [key, g] : groups) {
    if (g.teachers.size() >= 2) agreements.push_back(agreement_score(g.ratings, g.category->rating_domain));
  }
  if (!agreements.empty()) out.rating_agreement = mean(agreements);

  if (n_weeks >= 2) {
    std::vector<double> stability;
    for (const auto& [student, counts] : weekly) {
      const double cv = population_stddev(counts) / mean(counts);
      stability.push_back(1.0 / (1.0 + cv));
    }
    out.cadence_stability = mean(stability);
  }
  out.score = (out.rating_agreement + out.cadence_stability) / 2.0;
  return out;
}

bool attribute_populated(const BehaviorRecord& r, std::string_view attribute) {
  if (attribute == "record_id") return !r.record_id.empty();
  if (attribute == "student_id") return !r.student_id.empty();
  if (attribute == "teacher_id") return !r.teacher_id.empty();
  if (attribute == "lesson_id") return !r.lesson_id.empty();
  if (attribute == "category_code") return !r.category_code.empty();
  if (attribute == "comment") return r.comment.has_value() && !r.comment->empty();
  if (attribute == "rating" || attribute == "event_ts" || attribute == "capture_ts") return true;
  throw std::invalid_argument("unknown record attribute \"" + std::string(attribute) + "\"");
}

CompletenessScore completeness(std::span<const BehaviorRecord> records,
                               std::span<const std::string> roster, const QualityConfig& cfg) {
  CompletenessScore out;
  const std::set<std::string> roster_set(roster.begin(), roster.end());
  if (records.empty()) {
    out.roster_coverage = roster_set.empty() ? 1.0 : 0.0;
    return out;
  }
  const auto n_attrs = static_cast<double>(cfg.required_attributes.size());
  double sum = 0.0;
  std::set<std::string> seen;
  for (const auto& r : records) {
    std::size_t populated = 0;
    for (const auto& a : cfg.required_attributes) populated += attribute_populated(r, a) ? 1 : 0;
    sum += static_cast<double>(populated) / n_attrs;
    if (roster_set.contains(r.student_id)) seen.insert(r.student_id);
  }
  out.attr_score = sum / static_cast<double>(records.size());
  out.roster_coverage = roster_set.empty()
                            ? 1.0
                            : static_cast<double>(seen.size()) / static_cast<double>(roster_set.size());
  return out;
}

QualityReport quality_report(std::span<const BehaviorRecord> records, const BehaviorTaxonomy& taxonomy,
                             std::span<const std::string> roster, const QualityConfig& cfg) {
  cfg.validate();
  QualityReport r;
  r.accuracy = accuracy(records, taxonomy);
  const auto t = timeliness(records, cfg);
  r.timeliness = t.score;
  r.mean_capture_latency_s = t.mean_latency_s;
  r.consistency = consistency(records, taxonomy, cfg);
  const auto c = completeness(records, roster, cfg);
  r.completeness = c.attr_score;
  r.roster_coverage = c.roster_coverage;
  r.n_records = records.size();
  return r;
}

double quality_index(const QualityReport& r) noexcept {
  return (r.accuracy + r.timeliness + r.consistency + r.completeness) / 4.0;
}

QualityComparison compare(const QualityReport& legacy, const QualityReport& fresh) {
  QualityComparison c;
  c.accuracy = fresh.accuracy - legacy.accuracy;
  c.timeliness = fresh.timeliness - legacy.timeliness;
  c.consistency = fresh.consistency - legacy.consistency;
  c.completeness = fresh.completeness - legacy.completeness;
  c.mean_capture_latency_s = fresh.mean_capture_latency_s - legacy.mean_capture_latency_s;
  c.roster_coverage = fresh.roster_coverage - legacy.roster_coverage;
  c.dominance = fresh.accuracy >= legacy.accuracy && fresh.timeliness >= legacy.timeliness &&
                fresh.consistency >= legacy.consistency && fresh.completeness >= legacy.completeness;
  return c;
}

void to_json(json& j, const QualityReport& r) {
  j = json{{"accuracy", r.accuracy},
           {"timeliness", r.timeliness},
           {"mean_capture_latency_s", r.mean_capture_latency_s},
           {"consistency", r.consistency},
           {"completeness", r.completeness},
           {"roster_coverage", r.roster_coverage},
           {"n_records", r.n_records}};
}

void from_json(const json& j, QualityReport& r) {
  r.accuracy = j.at("accuracy").get<double>();
  r.timeliness = j.at("timeliness").get<double>();
  r.mean_capture_latency_s = j.at("mean_capture_latency_s").get<double>();
  r.consistency = j.at("consistency").get<double>();
  r.completeness = j.at("completeness").get<double>();
  r.roster_coverage = j.at("roster_coverage").get<double>();
  r.n_records = j.at("n_records").get<std::size_t>();
}

void to_json(json& j, const QualityConfig& c) {
  j = json{{"timeliness_threshold_s", c.timeliness_threshold_s},
           {"required_attributes", c.required_attributes},
           {"consistency_window_s", c.consistency_window_s}};
}

void from_json(const json& j, QualityConfig& c) {
  c = QualityConfig{};
  c.timeliness_threshold_s = j.value("timeliness_threshold_s", c.timeliness_threshold_s);
  c.required_attributes = j.value("required_attributes", c.required_attributes);
  c.consistency_window_s = j.value("consistency_window_s", c.consistency_window_s);
}

void to_json(json& j, const QualityComparison& c) {
  j = json{{"deltas",
            {{"accuracy", c.accuracy},
             {"timeliness", c.timeliness},
             {"consistency", c.consistency},
             {"completeness", c.completeness},
             {"mean_capture_latency_s", c.mean_capture_latency_s},
             {"roster_coverage", c.roster_coverage}}},
           {"dominance", c.dominance}};
}

}  // namespace proxiclass::quality
