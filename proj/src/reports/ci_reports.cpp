#include "proxiclass/reports/ci_reports.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <stdexcept>

namespace proxiclass::reports {

void BestPracticePolicy::validate() const {
  if (!(target_positive_ratio >= 0.0 && target_positive_ratio <= 1.0))
    throw std::invalid_argument("policy: target_positive_ratio must be in [0,1]");
  if (min_records_per_lesson < 0) throw std::invalid_argument("policy: min_records_per_lesson must be >= 0");
  if (!(max_feedback_latency_s >= 0.0)) throw std::invalid_argument("policy: max_feedback_latency_s must be >= 0");
}

TeacherAlignment alignment_components(std::string teacher_id, std::span<const BehaviorRecord> records,
                                      std::span<const Lesson> lessons, const BehaviorTaxonomy& taxonomy,
                                      const BestPracticePolicy& policy) {
  TeacherAlignment a;
  a.teacher_id = std::move(teacher_id);

  if (!records.empty()) {
    std::size_t positive = 0;
    std::size_t on_time = 0;
    for (const auto& r : records) {
      const auto* cat = taxonomy.find(r.category_code);
      if (cat != nullptr && cat->valence == Valence::positive) ++positive;
      if (r.capture_latency_s() <= policy.max_feedback_latency_s) ++on_time;
    }
    const auto n = static_cast<double>(records.size());
    a.positive_ratio = static_cast<double>(positive) / n;
    a.latency_score = static_cast<double>(on_time) / n;
  }

  if (!lessons.empty()) {
    double sum = 0.0;
    for (const auto& lesson : lessons) {
      if (policy.min_records_per_lesson == 0) {
        sum += 1.0;
        continue;
      }
      const auto in_lesson = std::count_if(records.begin(), records.end(), [&](const BehaviorRecord& r) {
        return r.lesson_id == lesson.lesson_id;
      });
      sum += std::min(1.0, static_cast<double>(in_lesson) / policy.min_records_per_lesson);
    }
    a.cadence_score = sum / static_cast<double>(lessons.size());
  }

  a.alignment = (a.positive_ratio + a.cadence_score + a.latency_score) / 3.0;
  return a;
}

double peer_percentile(double alignment, std::span<const double> peers) {
  if (peers.size() < 2) return 1.0;
  const auto less = std::count_if(peers.begin(), peers.end(), [&](double p) { return p < alignment; });
  const auto equal = std::count(peers.begin(), peers.end(), alignment);
  const double rank = static_cast<double>(less) + 0.5 * static_cast<double>(std::max<long>(equal - 1, 0));
  return std::clamp(rank / static_cast<double>(peers.size() - 1), 0.0, 1.0);
}

TeacherAlignment teacher_alignment(std::string teacher_id, std::span<const BehaviorRecord> records,
                                   std::span<const Lesson> lessons, const BehaviorTaxonomy& taxonomy,
                                   const BestPracticePolicy& policy, std::span<const double> peers) {
  auto a = alignment_components(std::move(teacher_id), records, lessons, taxonomy, policy);
  a.peer_percentile = peer_percentile(a.alignment, peers);
  return a;
}

std::vector<TeacherAlignment> all_teacher_alignments(std::span<const BehaviorRecord> records,
                                                     std::span<const Lesson> lessons,
                                                     const BehaviorTaxonomy& taxonomy,
                                                     const BestPracticePolicy& policy) {
  std::map<std::string, std::vector<Lesson>> by_teacher;
  for (const auto& l : lessons) by_teacher[l.teacher_id].push_back(l);
  std::map<std::string, std::vector<BehaviorRecord>> records_by_teacher;
  for (const auto& r : records)
    if (by_teacher.contains(r.teacher_id)) records_by_teacher[r.teacher_id].push_back(r);

  std::vector<TeacherAlignment> out;
  for (const auto& [teacher, own_lessons] : by_teacher)
    out.push_back(alignment_components(teacher, records_by_teacher[teacher], own_lessons, taxonomy, policy));

  std::vector<double> peers;
  for (const auto& a : out) peers.push_back(a.alignment);
  for (auto& a : out) a.peer_percentile = peer_percentile(a.alignment, peers);
  return out;
}

std::vector<CategoryAgreement> cross_teacher_consistency(std::span<const BehaviorRecord> records,
                                                         std::string_view student_id,
                                                         const BehaviorTaxonomy& taxonomy,
                                                         Timestamp from, Timestamp to) {
  struct Group {
    std::vector<int> ratings;
    std::set<std::string> teachers;
  };
  std::map<std::string, Group> groups;
  for (const auto& r : records) {
    if (r.student_id != student_id || r.event_ts < from || r.event_ts > to) continue;
    if (taxonomy.find(r.category_code) == nullptr) continue;
    auto& g = groups[r.category_code];
    g.ratings.push_back(r.rating);
    g.teachers.insert(r.teacher_id);
  }
  std::vector<CategoryAgreement> out;
  for (const auto& [code, g] : groups) {
    if (g.teachers.size() < 2) continue;
    out.push_back({code, quality::agreement_score(g.ratings, taxonomy.find(code)->rating_domain),
                   g.ratings.size(), g.teachers.size()});
  }
  return out;
}

SchoolKpi school_kpi(std::span<const BehaviorRecord> records, const BehaviorTaxonomy& taxonomy,
                     std::span<const std::string> roster, std::span<const Lesson> lessons,
                     const BestPracticePolicy& policy, const quality::QualityConfig& cfg) {
  SchoolKpi k;
  const auto alignments = all_teacher_alignments(records, lessons, taxonomy, policy);
  if (!alignments.empty()) {
    double sum = 0.0;
    for (const auto& a : alignments) sum += a.alignment;
    k.mean_alignment = sum / static_cast<double>(alignments.size());
  }
  const auto report = quality::quality_report(records, taxonomy, roster, cfg);
  k.quality_index = quality::quality_index(report);
  k.coverage = report.roster_coverage;
  k.kpi = (k.mean_alignment + k.quality_index + k.coverage) / 3.0;
  return k;
}

namespace {

constexpr auto kWeek = std::chrono::days{7};

template <typename Fn>
std::vector<SeriesPoint> weekly(std::span<const BehaviorRecord> records, std::span<const Lesson> lessons,
                                Timestamp from, Timestamp to, Fn&& score) {
  if (to < from) throw std::invalid_argument("series: inverted time range");
  std::vector<SeriesPoint> out;
  for (Timestamp start = from; start <= to; start += kWeek) {
    const Timestamp end = start + kWeek;
    std::vector<BehaviorRecord> rs;
    for (const auto& r : records)
      if (r.event_ts >= start && r.event_ts < end && r.event_ts <= to) rs.push_back(r);
    std::vector<Lesson> ls;
    for (const auto& l : lessons)
      if (l.start >= start && l.start < end && l.start <= to) ls.push_back(l);
    out.push_back({start, score(rs, ls)});
  }
  return out;
}

}  // namespace

std::vector<SeriesPoint> teacher_alignment_series(std::string_view teacher_id,
                                                  std::span<const BehaviorRecord> records,
                                                  std::span<const Lesson> lessons,
                                                  const BehaviorTaxonomy& taxonomy,
                                                  const BestPracticePolicy& policy, Timestamp from,
                                                  Timestamp to) {
  std::vector<BehaviorRecord> own;
  for (const auto& r : records)
    if (r.teacher_id == teacher_id) own.push_back(r);
  std::vector<Lesson> own_lessons;
  for (const auto& l : lessons)
    if (l.teacher_id == teacher_id) own_lessons.push_back(l);
  return weekly(own, own_lessons, from, to, [&](const auto& rs, const auto& ls) {
    return alignment_components(std::string(teacher_id), rs, ls, taxonomy, policy).alignment;
  });
}

std::vector<SeriesPoint> school_kpi_series(std::span<const BehaviorRecord> records,
                                           const BehaviorTaxonomy& taxonomy,
                                           std::span<const std::string> roster,
                                           std::span<const Lesson> lessons,
                                           const BestPracticePolicy& policy,
                                           const quality::QualityConfig& cfg, Timestamp from,
                                           Timestamp to) {
  return weekly(records, lessons, from, to, [&](const auto& rs, const auto& ls) {
    return school_kpi(rs, taxonomy, roster, ls, policy, cfg).kpi;
  });
}

void to_json(json& j, const BestPracticePolicy& p) {
  j = json{{"target_positive_ratio", p.target_positive_ratio},
           {"min_records_per_lesson", p.min_records_per_lesson},
           {"max_feedback_latency_s", p.max_feedback_latency_s}};
}

void from_json(const json& j, BestPracticePolicy& p) {
  p = BestPracticePolicy{};
  p.target_positive_ratio = j.value("target_positive_ratio", p.target_positive_ratio);
  p.min_records_per_lesson = j.value("min_records_per_lesson", p.min_records_per_lesson);
  p.max_feedback_latency_s = j.value("max_feedback_latency_s", p.max_feedback_latency_s);
}

void to_json(json& j, const TeacherAlignment& a) {
  j = json{{"teacher_id", a.teacher_id},       {"positive_ratio", a.positive_ratio},
           {"cadence_score", a.cadence_score}, {"latency_score", a.latency_score},
           {"alignment", a.alignment},         {"peer_percentile", a.peer_percentile}};
}

void to_json(json& j, const CategoryAgreement& c) {
  j = json{{"category_code", c.category_code},
           {"agreement", c.agreement},
           {"n_ratings", c.n_ratings},
           {"n_teachers", c.n_teachers}};
}

void to_json(json& j, const SchoolKpi& k) {
  j = json{{"mean_alignment", k.mean_alignment},
           {"quality_index", k.quality_index},
           {"coverage", k.coverage},
           {"kpi", k.kpi}};
}

void to_json(json& j, const SeriesPoint& p) {
  j = json{{"bucket_start", format_rfc3339(p.bucket_start)}, {"value", p.value}};
}

}  // namespace proxiclass::reports
