#include <gtest/gtest.h>

#include <set>

#include "proxiclass/quality/quality.hpp"
#include "proxiclass/sim/classroom.hpp"
#include "proxiclass/sim/config.hpp"

using namespace proxiclass;
using namespace proxiclass::sim;
using namespace std::chrono;

namespace {

struct Prepared {
  sis::SisStore store;
  SessionContext ctx;
};

std::unique_ptr<Prepared> prepare(const SimSetup& setup) {
  auto p = std::make_unique<Prepared>();
  const TermShape shape;
  prepare_store(p->store, setup, shape, 1);
  p->ctx = session_context(shape, 0);
  return p;
}

std::vector<std::string> roster_ids(const SimSetup& s) {
  std::vector<std::string> ids;
  for (const auto& st : s.roster) ids.push_back(st.student_id);
  return ids;
}

}  // namespace

TEST(Session, NoEventsNoRecords) {
  auto setup = default_setup();
  setup.session.event_rate_per_student_per_session = 0;
  for (auto agent : {AgentKind::legacy, AgentKind::proximity}) {
    const auto out = run_session(setup, agent);
    EXPECT_EQ(out.events_generated, 0u);
    EXPECT_EQ(out.records_captured, 0u);
    EXPECT_EQ(out.total_interactions, 0u);
  }
}

TEST(Session, FreeTimeCapturesEverythingAtThreeToOne) {
  auto setup = default_setup();
  setup.session.teaching_fraction = 0;
  std::vector<BehaviorEvent> events;
  const auto start = session_context({}, 0).start;
  for (int i = 0; i < 10; ++i) {
    const auto& cat = setup.taxonomy.categories()[i % 5];
    const auto id = setup.roster[i * 2].student_id;
    events.push_back({id, cat.code, true_rating(id, *setup.taxonomy.find(cat.code)), start + seconds{5 * i}});
  }
  std::size_t interactions[2];
  for (auto agent : {AgentKind::legacy, AgentKind::proximity}) {
    auto p = prepare(setup);
    const auto out = simulate_events(setup, agent, p->ctx, events, p->store);
    EXPECT_EQ(out.records_captured, 10u) << to_string(agent);
    EXPECT_EQ(p->store.record_count(), 10u);
    interactions[static_cast<int>(agent)] = out.total_interactions;
  }
  EXPECT_EQ(interactions[0], 60u);
  EXPECT_EQ(interactions[1], 20u);
}

TEST(Session, BudgetCapsCaptures) {
  auto setup = default_setup();
  setup.session.event_rate_per_student_per_session = 20;
  EXPECT_DOUBLE_EQ(setup.session.capture_budget_s(), 360.0);
  const auto legacy = run_session(setup, AgentKind::legacy);
  const auto prox = run_session(setup, AgentKind::proximity);
  EXPECT_EQ(legacy.records_captured, 15u);
  EXPECT_EQ(prox.records_captured, 45u);
  EXPECT_EQ(legacy.events_dropped(), legacy.events_generated - 15);
}

TEST(Session, InteractionInvariantAndLatencyFloor) {
  const auto setup = default_setup();
  for (auto agent : {AgentKind::legacy, AgentKind::proximity}) {
    const auto out = run_session(setup, agent);
    ASSERT_LE(out.records_captured, out.events_generated);
    EXPECT_EQ(out.total_interactions, out.records_captured * static_cast<std::size_t>(setup.interaction.steps(agent)));
    for (const auto& r : out.dataset) ASSERT_GE(r.capture_latency_s(), setup.interaction.capture_cost_s(agent));
    for (const auto& r : out.dataset)
      ASSERT_EQ(validate_record(r, setup.taxonomy), ValidationOutcome::valid);
  }
}

TEST(Session, InvalidSetupRejectedBeforeStepping) {
  auto setup = default_setup();
  setup.session.teaching_fraction = 1.5;
  setup.interaction.proximity_steps_per_record = 9;
  setup.session.duration_s = -1;
  EXPECT_GE(setup.errors().size(), 3u);
  EXPECT_THROW(run_session(setup, AgentKind::legacy), std::domain_error);
}

TEST(Session, Deterministic) {
  auto setup = default_setup();
  setup.session.record_trace = true;
  for (auto agent : {AgentKind::legacy, AgentKind::proximity}) {
    const auto a = run_session(setup, agent);
    const auto b = run_session(setup, agent);
    EXPECT_EQ(a.dataset, b.dataset);
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.total_interactions, b.total_interactions);
  }
}

TEST(Term, SingleSessionEqualsRunSession) {
  const auto setup = default_setup();
  for (auto agent : {AgentKind::legacy, AgentKind::proximity}) {
    const auto term = run_term(1, setup, agent);
    const auto one = run_session(setup, agent);
    EXPECT_EQ(term.aggregate.dataset, one.dataset);
    EXPECT_EQ(term.aggregate.records_captured, one.records_captured);
    EXPECT_EQ(term.aggregate.total_interactions, one.total_interactions);
    ASSERT_EQ(term.sessions.size(), 1u);
  }
}

TEST(Term, DifferentSeedsDiffer) {
  std::vector<std::vector<BehaviorRecord>> seen;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto setup = default_setup();
    setup.session.rng_seed = seed;
    auto ds = run_term(3, setup, AgentKind::proximity).aggregate.dataset;
    for (const auto& prev : seen) ASSERT_NE(prev, ds) << seed;
    seen.push_back(std::move(ds));
  }
}

TEST(Term, TwentySessionsRoughlyDoubleRecords) {
  const auto setup = default_setup();
  const auto legacy = run_term(20, setup, AgentKind::legacy);
  const auto prox = run_term(20, setup, AgentKind::proximity);
  ASSERT_GT(legacy.aggregate.records_captured, 0u);
  const double ratio = static_cast<double>(prox.aggregate.records_captured) / legacy.aggregate.records_captured;
  EXPECT_GE(ratio, 1.8);
  const double per_legacy = static_cast<double>(legacy.aggregate.total_interactions) / legacy.aggregate.records_captured;
  const double per_prox = static_cast<double>(prox.aggregate.total_interactions) / prox.aggregate.records_captured;
  EXPECT_DOUBLE_EQ(per_legacy / per_prox, 3.0);
  std::set<std::string> ids;
  for (const auto& r : prox.aggregate.dataset) ASSERT_TRUE(ids.insert(r.record_id).second);
}

TEST(Degrade, ZeroRatesAreIdentity) {
  const auto clean = run_term(3, default_setup(), AgentKind::legacy).aggregate.dataset;
  EXPECT_EQ(degrade_dataset(clean, {0, 0, 0}, 9), clean);
}

TEST(Degrade, AllInvalidCodes) {
  const auto setup = default_setup();
  const auto clean = run_term(3, setup, AgentKind::legacy).aggregate.dataset;
  const auto bad = degrade_dataset(clean, {0, 1.0, 0}, 9);
  ASSERT_EQ(bad.size(), clean.size());
  EXPECT_EQ(quality::accuracy(bad, setup.taxonomy), 0.0);
}

TEST(Degrade, EmpiricalRatesConcentrate) {
  std::vector<BehaviorRecord> clean;
  const auto t0 = TermShape{}.term_start;
  for (int i = 0; i < 1000; ++i)
    clean.push_back({"R" + std::to_string(i), "S001", "T01", "L000", "RESPECT", 2, "note", t0, t0 + seconds{8}});
  const DefectRates rates;
  const auto out = degrade_dataset(clean, rates, 2024);
  ASSERT_EQ(out.size(), 1000u);
  double missing = 0, invalid = 0, late = 0;
  for (const auto& r : out) {
    missing += !r.comment || r.comment->empty();
    invalid += r.category_code == kInvalidCategoryCode;
    late += r.capture_latency_s() >= rates.late_delay_min_s;
  }
  EXPECT_NEAR(missing / 1000, 0.3, 0.04);
  EXPECT_NEAR(invalid / 1000, 0.2, 0.04);
  EXPECT_NEAR(late / 1000, 0.4, 0.04);
}

TEST(Degrade, RejectsBadRates) {
  EXPECT_THROW((DefectRates{1.2, 0, 0}.validate()), std::domain_error);
  EXPECT_THROW((DefectRates{0, 0, 0, 100, 50}.validate()), std::domain_error);
}

TEST(Quality, ProximityDominatesDegradedLegacy) {
  const auto setup = default_setup();
  const auto roster = roster_ids(setup);
  const auto legacy = run_term(20, setup, AgentKind::legacy).aggregate.dataset;
  const auto prox = run_term(20, setup, AgentKind::proximity).aggregate.dataset;
  const quality::QualityConfig cfg;
  const auto q_legacy = quality::quality_report(degrade_dataset(legacy, {}, 7), setup.taxonomy, roster, cfg);
  const auto q_prox = quality::quality_report(prox, setup.taxonomy, roster, cfg);
  const auto c = quality::compare(q_legacy, q_prox);
  EXPECT_TRUE(c.dominance);
  EXPECT_GT(c.accuracy, 0);
  EXPECT_GT(c.completeness, 0);
  EXPECT_GT(c.timeliness, 0);
}

TEST(Config, DefaultsRoundTrip) {
  const auto c = default_sim_config();
  const auto j = sim_config_to_json(c);
  EXPECT_EQ(sim_config_to_json(sim_config_from_json(j)), j);
  EXPECT_EQ(sim_config_from_json(json::object()).sessions, 20);
}

TEST(Config, ErrorsListedExhaustively) {
  const json bad = {{"sessions", 0},
                    {"session", {{"teaching_fraction", 2.0}, {"duration_s", "long"}}},
                    {"interaction", {{"seconds_per_step", -4}}},
                    {"path_loss", {{"exponent", 0}}},
                    {"scanner", {{"confirm_scans", 0}}},
                    {"defects", {{"invalid_code", -0.1}}}};
  try {
    sim_config_from_json(bad);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.errors().size(), 7u);
    const std::string all = e.what();
    for (const char* key : {"sessions", "teaching_fraction", "duration_s", "seconds_per_step", "exponent",
                            "confirm_scans", "invalid_code"})
      EXPECT_NE(all.find(key), std::string::npos) << key << " missing from: " << all;
  }
}
