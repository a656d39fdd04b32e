#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <unordered_set>

#include "proxiclass/core/json.hpp"

using namespace proxiclass;
using namespace std::chrono;

namespace {

BehaviorRecord record(std::string code, int rating, Timestamp event, Timestamp capture) {
  return {"R1", "S1", "T1", "L1", std::move(code), rating, "note", event, capture};
}

const Timestamp kT0 = Timestamp{sys_days{year{2024} / 7 / 22}} + hours{9};

}  // namespace

TEST(Udid, GenerationIsDeterministicPerSeed) {
  EXPECT_EQ(generate_udid(0), generate_udid(0));
  EXPECT_NE(generate_udid(0), generate_udid(1));
}

TEST(Udid, FormatHoldsForManySeeds) {
  const std::regex hex("^[0-9a-f]{32}$");
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto u = generate_udid(rng());
    ASSERT_TRUE(std::regex_match(u.str(), hex)) << u.str();
  }
}

TEST(Udid, NoCollisionsOverHundredThousandSeeds) {
  std::unordered_set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 100000; ++seed) ASSERT_TRUE(seen.insert(generate_udid(seed).str()).second) << seed;
}

TEST(Udid, ParseRejectsMalformed) {
  EXPECT_THROW(Udid::parse("ABCDEF0123456789abcdef0123456789"), std::invalid_argument);
  EXPECT_THROW(Udid::parse("abc"), std::invalid_argument);
  EXPECT_THROW(Udid::parse("g0000000000000000000000000000000"), std::invalid_argument);
  EXPECT_NO_THROW(Udid::parse("0123456789abcdef0123456789abcdef"));
}

TEST(ValidateRecord, AllConstraintsMet) {
  EXPECT_EQ(validate_record(record("RESPECT", 2, kT0, kT0), BehaviorTaxonomy::standard()), ValidationOutcome::valid);
}

TEST(ValidateRecord, UnknownCategory) {
  EXPECT_EQ(validate_record(record("XYZ", 2, kT0, kT0), BehaviorTaxonomy::standard()),
            ValidationOutcome::unknown_category);
}

TEST(ValidateRecord, RatingOutOfDomain) {
  EXPECT_EQ(validate_record(record("RESPECT", 7, kT0, kT0), BehaviorTaxonomy::standard()),
            ValidationOutcome::rating_out_of_domain);
}

TEST(ValidateRecord, TimestampInverted) {
  EXPECT_EQ(validate_record(record("RESPECT", 2, kT0, kT0 - seconds{1}), BehaviorTaxonomy::standard()),
            ValidationOutcome::timestamp_inverted);
}

TEST(ValidateRecord, FirstFailingCheckWins) {
  const auto tax = BehaviorTaxonomy::standard();
  // All three checks fail; category is reported.
  EXPECT_EQ(validate_record(record("XYZ", 9, kT0, kT0 - seconds{5}), tax), ValidationOutcome::unknown_category);
  // Rating and timestamp fail; rating is reported.
  EXPECT_EQ(validate_record(record("EFFORT", 0, kT0, kT0 - seconds{5}), tax), ValidationOutcome::rating_out_of_domain);
}

TEST(ValidateRecord, DegenerateBinaryDomain) {
  BehaviorTaxonomy tax({{"GOOD", "Good", Valence::positive, {1, 1}}, {"BAD", "Bad", Valence::negative, {1, 1}}});
  EXPECT_EQ(validate_record(record("GOOD", 1, kT0, kT0), tax), ValidationOutcome::valid);
  EXPECT_EQ(validate_record(record("GOOD", 2, kT0, kT0), tax), ValidationOutcome::rating_out_of_domain);
}

TEST(Taxonomy, RejectsInvalidDefinitions) {
  EXPECT_THROW(BehaviorTaxonomy({{"A", "A", Valence::positive, {1, 3}}, {"A", "A", Valence::negative, {1, 3}}}),
               std::invalid_argument);
  EXPECT_THROW(BehaviorTaxonomy({{"A", "A", Valence::positive, {1, 3}}}), std::invalid_argument);
  EXPECT_THROW(BehaviorTaxonomy({{"A", "A", Valence::positive, {3, 1}}, {"B", "B", Valence::negative, {1, 3}}}),
               std::invalid_argument);
}

TEST(Student, YearLevelBounds) {
  EXPECT_NO_THROW(check_student({"S1", "A", 5, {}}));
  EXPECT_NO_THROW(check_student({"S1", "A", 12, {}}));
  EXPECT_THROW(check_student({"S1", "A", 4, {}}), std::invalid_argument);
  EXPECT_THROW(check_student({"S1", "A", 13, {}}), std::invalid_argument);
}

TEST(Lesson, Invariants) {
  EXPECT_THROW(check_lesson({"L1", "T1", {"S1"}, kT0, kT0}), std::invalid_argument);
  EXPECT_THROW(check_lesson({"L1", "T1", {}, kT0, kT0 + hours{1}}), std::invalid_argument);
  EXPECT_NO_THROW(check_lesson({"L1", "T1", {"S1"}, kT0, kT0 + hours{1}}));
}

TEST(Time, Rfc3339Formatting) {
  EXPECT_EQ(format_rfc3339(kT0), "2024-07-22T09:00:00Z");
  EXPECT_EQ(format_rfc3339(kT0 + milliseconds{250}), "2024-07-22T09:00:00.250Z");
}

TEST(Time, Rfc3339ParsingHandlesOffsetsAndFractions) {
  EXPECT_EQ(parse_rfc3339("2024-07-22T09:00:00Z"), kT0);
  EXPECT_EQ(parse_rfc3339("2024-07-22T19:00:00+10:00"), kT0);
  EXPECT_EQ(parse_rfc3339("2024-07-22T09:00:00.25Z"), kT0 + milliseconds{250});
  EXPECT_THROW(parse_rfc3339("2024-07-22 09:00"), std::invalid_argument);
  EXPECT_THROW(parse_rfc3339("2024-13-22T09:00:00Z"), std::invalid_argument);
  EXPECT_THROW(parse_rfc3339("2024-07-22T09:00:00"), std::invalid_argument);
}

TEST(Json, RecordRoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> ms(0, 4'000'000'000'000LL);
  std::uniform_int_distribution<int> rating(-5, 10);
  for (int i = 0; i < 500; ++i) {
    BehaviorRecord r{"R" + std::to_string(i), "S1", "T1", i % 3 ? "L1" : "", i % 2 ? "RESPECT" : "??",
                     rating(rng), i % 4 ? std::optional<std::string>("c\"x\n") : std::nullopt,
                     Timestamp{milliseconds{ms(rng)}}, Timestamp{milliseconds{ms(rng)}}};
    const auto text = json(r).dump();
    const auto back = json::parse(text).get<BehaviorRecord>();
    ASSERT_EQ(back, r);
    ASSERT_EQ(json(back).dump(), text);
  }
}

TEST(Json, StudentAndTaxonomyShapes) {
  const Student s{"S1", "Ann", 7, generate_udid(3)};
  const auto j = json(s);
  EXPECT_EQ(j.at("udid").get<std::string>(), generate_udid(3).str());
  EXPECT_EQ(j.get<Student>(), s);
  EXPECT_TRUE(json(Student{"S2", "Bo", 8, {}}).at("udid").is_null());

  const auto tax = BehaviorTaxonomy::standard();
  EXPECT_EQ(taxonomy_from_json(json(tax)), tax);
  EXPECT_EQ(json(tax).at("categories")[0].at("rating_domain"), json::array({1, 3}));
}
