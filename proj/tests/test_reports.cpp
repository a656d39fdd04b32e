#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "proxiclass/reports/ci_reports.hpp"

using namespace proxiclass;
using namespace proxiclass::reports;
using namespace std::chrono;

namespace {

const Timestamp kT0 = Timestamp{sys_days{year{2024} / 7 / 22}} + hours{9};
const BehaviorTaxonomy kTax = BehaviorTaxonomy::standard();

BehaviorRecord rec(std::string student, std::string teacher, std::string lesson, std::string code, int rating,
                   Timestamp event, double latency_s = 0) {
  static int n = 0;
  return {"R" + std::to_string(n++), std::move(student), std::move(teacher), std::move(lesson),
          std::move(code), rating, "note", event, add_seconds(event, latency_s)};
}

Lesson lesson(std::string id, std::string teacher, std::vector<std::string> roster, Timestamp start) {
  return {std::move(id), std::move(teacher), std::move(roster), start, start + hours{1}};
}

}  // namespace

TEST(Alignment, EightPositiveTwoNegative) {
  std::vector<Lesson> ls{lesson("L1", "T1", {"S1"}, kT0), lesson("L2", "T1", {"S1"}, kT0 + days{1})};
  std::vector<BehaviorRecord> rs;
  for (int i = 0; i < 10; ++i)
    rs.push_back(rec("S1", "T1", i < 5 ? "L1" : "L2", i < 8 ? "RESPECT" : "DISRUPT", 2, kT0));
  const auto a = alignment_components("T1", rs, ls, kTax, {});
  EXPECT_DOUBLE_EQ(a.positive_ratio, 0.8);
  EXPECT_DOUBLE_EQ(a.cadence_score, 1.0);
  EXPECT_DOUBLE_EQ(a.latency_score, 1.0);
  EXPECT_NEAR(a.alignment, 0.9333, 1e-4);
}

TEST(Alignment, ZeroRecords) {
  std::vector<Lesson> ls{lesson("L1", "T1", {"S1"}, kT0)};
  const auto a = alignment_components("T1", {}, ls, kTax, {});
  EXPECT_DOUBLE_EQ(a.positive_ratio, 1.0);
  EXPECT_DOUBLE_EQ(a.cadence_score, 0.0);
  EXPECT_DOUBLE_EQ(a.latency_score, 1.0);
  EXPECT_NEAR(a.alignment, 0.6667, 1e-4);
}

TEST(Alignment, PartialCadenceAndLateFeedback) {
  std::vector<Lesson> ls{lesson("L1", "T1", {"S1"}, kT0)};
  std::vector<BehaviorRecord> rs{rec("S1", "T1", "L1", "RESPECT", 2, kT0, 10),
                                 rec("S1", "T1", "L1", "RESPECT", 2, kT0, 900)};
  const auto a = alignment_components("T1", rs, ls, kTax, {});
  EXPECT_NEAR(a.cadence_score, 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(a.latency_score, 0.5);
}

TEST(Alignment, ConvertingNegativeToPositiveIsMonotone) {
  std::mt19937_64 rng(4);
  std::vector<Lesson> ls{lesson("L1", "T1", {"S1"}, kT0)};
  for (int trial = 0; trial < 100; ++trial) {
    auto rs = oracle::random_records(rng, 30);
    for (auto& r : rs) r.teacher_id = "T1";
    const auto before = alignment_components("T1", rs, ls, kTax, {});
    for (auto& r : rs) {
      if (r.category_code == "DISRUPT" || r.category_code == "OFFTASK") {
        r.category_code = "RESPECT";
        break;
      }
    }
    const auto after = alignment_components("T1", rs, ls, kTax, {});
    ASSERT_GE(after.positive_ratio, before.positive_ratio);
  }
}

TEST(PeerPercentile, Extremes) {
  const std::vector<double> alone{0.5};
  EXPECT_DOUBLE_EQ(peer_percentile(0.5, alone), 1.0);
  const std::vector<double> peers{0.2, 0.5, 0.9};
  EXPECT_DOUBLE_EQ(peer_percentile(0.9, peers), 1.0);
  EXPECT_DOUBLE_EQ(peer_percentile(0.2, peers), 0.0);
  EXPECT_DOUBLE_EQ(peer_percentile(0.5, peers), 0.5);
}

TEST(PeerPercentile, AllTeachersSingleTeacherSchool) {
  std::vector<Lesson> ls{lesson("L1", "T1", {"S1"}, kT0)};
  const auto all = all_teacher_alignments({}, ls, kTax, {});
  ASSERT_EQ(all.size(), 1u);
  EXPECT_DOUBLE_EQ(all[0].peer_percentile, 1.0);
}

TEST(CrossTeacher, SevenTeachersAgree) {
  std::vector<BehaviorRecord> rs;
  for (int t = 1; t <= 7; ++t) rs.push_back(rec("S1", "T" + std::to_string(t), "", "RESPECT", 2, kT0 + hours{t}));
  const auto out = cross_teacher_consistency(rs, "S1", kTax, kT0, kT0 + days{7});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].category_code, "RESPECT");
  EXPECT_DOUBLE_EQ(out[0].agreement, 1.0);
  EXPECT_EQ(out[0].n_teachers, 7u);
}

TEST(CrossTeacher, OppositeRatings) {
  std::vector<BehaviorRecord> rs{rec("S1", "T1", "", "EFFORT", 1, kT0), rec("S1", "T2", "", "EFFORT", 3, kT0)};
  const auto out = cross_teacher_consistency(rs, "S1", kTax, kT0, kT0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].category_code, "EFFORT");
  EXPECT_DOUBLE_EQ(out[0].agreement, 0.0);
}

TEST(CrossTeacher, SingleTeacherAndWindow) {
  std::vector<BehaviorRecord> rs{rec("S1", "T1", "", "EFFORT", 1, kT0), rec("S1", "T1", "", "EFFORT", 3, kT0)};
  EXPECT_TRUE(cross_teacher_consistency(rs, "S1", kTax, kT0, kT0 + days{1}).empty());
  rs.push_back(rec("S1", "T2", "", "EFFORT", 2, kT0 + days{10}));
  EXPECT_TRUE(cross_teacher_consistency(rs, "S1", kTax, kT0, kT0 + days{1}).empty());
  EXPECT_EQ(cross_teacher_consistency(rs, "S1", kTax, kT0, kT0 + days{10}).size(), 1u);
}

TEST(SchoolKpi, PerfectDataset) {
  std::vector<std::string> roster{"S1", "S2"};
  std::vector<Lesson> ls{lesson("L1", "T1", roster, kT0), lesson("L2", "T2", roster, kT0)};
  std::vector<BehaviorRecord> rs;
  for (const auto& l : ls)
    for (int i = 0; i < 4; ++i) rs.push_back(rec(roster[i % 2], l.teacher_id, l.lesson_id, "RESPECT", 2, kT0));
  const auto k = school_kpi(rs, kTax, roster, ls, {}, {});
  EXPECT_DOUBLE_EQ(k.mean_alignment, 1.0);
  EXPECT_DOUBLE_EQ(k.quality_index, 1.0);
  EXPECT_DOUBLE_EQ(k.coverage, 1.0);
  EXPECT_DOUBLE_EQ(k.kpi, 1.0);
}

TEST(SchoolKpi, EmptySchool) {
  const auto k = school_kpi({}, kTax, {}, {}, {}, {});
  EXPECT_DOUBLE_EQ(k.mean_alignment, 1.0);
  EXPECT_DOUBLE_EQ(k.quality_index, 1.0);
  EXPECT_DOUBLE_EQ(k.coverage, 1.0);
  EXPECT_DOUBLE_EQ(k.kpi, 1.0);

  const std::vector<std::string> roster{"S1"};
  const auto with_students = school_kpi({}, kTax, roster, {}, {}, {});
  EXPECT_DOUBLE_EQ(with_students.coverage, 0.0);
  EXPECT_NEAR(with_students.kpi, 2.0 / 3.0, 1e-12);
}

TEST(SchoolKpi, MixedTwoTeacherFixture) {
  // T1: 2 positive, 1 negative in L1 (meets cadence), one late.
  // T2: 1 positive in L2 (cadence 1/3), one invalid rating, comment missing.
  std::vector<std::string> roster{"S1", "S2", "S3", "S4"};
  std::vector<Lesson> ls{lesson("L1", "T1", roster, kT0), lesson("L2", "T2", roster, kT0)};
  std::vector<BehaviorRecord> rs{rec("S1", "T1", "L1", "RESPECT", 2, kT0), rec("S2", "T1", "L1", "EFFORT", 3, kT0),
                                 rec("S1", "T1", "L1", "DISRUPT", 1, kT0, 600),
                                 rec("S2", "T2", "L2", "KINDNESS", 7, kT0)};
  rs[3].comment.reset();
  const double a1 = (2.0 / 3 + 1 + 2.0 / 3) / 3, a2 = (1 + 1.0 / 3 + 1) / 3;
  const double qi = (0.75 + 0.75 + 1.0 + (1 + 1 + 1 + 0.75) / 4) / 4;
  const double expected = ((a1 + a2) / 2 + qi + 0.5) / 3;
  const auto k = school_kpi(rs, kTax, roster, ls, {}, {});
  EXPECT_NEAR(k.mean_alignment, (a1 + a2) / 2, 1e-12);
  EXPECT_NEAR(k.quality_index, qi, 1e-12);
  EXPECT_DOUBLE_EQ(k.coverage, 0.5);
  EXPECT_NEAR(k.kpi, expected, 1e-12);
}

TEST(SchoolKpi, MatchesBruteForce) {
  std::mt19937_64 rng(31);
  const std::vector<std::string> roster{"S1", "S2", "S3", "S4", "S5", "S6", "S7"};
  const BestPracticePolicy policy;
  const quality::QualityConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const auto rs = oracle::random_records(rng, 50);
    std::vector<Lesson> ls;
    for (int l = 1; l <= 3; ++l)
      if (rng() % 4) ls.push_back(lesson("L" + std::to_string(l), "T" + std::to_string(1 + rng() % 4), roster, kT0));
    const auto k = school_kpi(rs, kTax, roster, ls, policy, cfg);
    const double want = oracle::school_kpi(rs, kTax, roster, ls, policy.max_feedback_latency_s,
                                           policy.min_records_per_lesson, cfg.timeliness_threshold_s,
                                           cfg.consistency_window_s, cfg.required_attributes);
    ASSERT_NEAR(k.kpi, want, 1e-12) << trial;
    for (double v : {k.mean_alignment, k.quality_index, k.coverage, k.kpi}) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(Series, WeeklyBuckets) {
  std::vector<std::string> roster{"S1"};
  std::vector<Lesson> ls{lesson("L1", "T1", roster, kT0), lesson("L2", "T1", roster, kT0 + days{7})};
  std::vector<BehaviorRecord> rs;
  for (int i = 0; i < 3; ++i) rs.push_back(rec("S1", "T1", "L1", "RESPECT", 2, kT0));
  rs.push_back(rec("S1", "T1", "L2", "DISRUPT", 2, kT0 + days{7}));
  const auto series = teacher_alignment_series("T1", rs, ls, kTax, {}, kT0, kT0 + days{13});
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series[0].bucket_start, kT0);
  EXPECT_EQ(series[1].bucket_start, kT0 + days{7});
  EXPECT_DOUBLE_EQ(series[0].value, 1.0);
  EXPECT_NEAR(series[1].value, (0.0 + 1.0 / 3 + 1.0) / 3, 1e-12);

  const auto kpi = school_kpi_series(rs, kTax, roster, ls, {}, {}, kT0, kT0 + days{13});
  ASSERT_EQ(kpi.size(), 2u);
  EXPECT_DOUBLE_EQ(kpi[0].value, 1.0);
}
