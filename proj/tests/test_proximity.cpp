#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "proxiclass/proximity/proximity.hpp"
#include "proxiclass/proximity/trace.hpp"

using namespace proxiclass;
using namespace proxiclass::proximity;
using namespace std::chrono;

namespace {

const Timestamp kT0 = Timestamp{sys_days{year{2024} / 7 / 22}};
const Udid u1 = generate_udid(1);
const Udid u2 = generate_udid(2);
const Udid u3 = generate_udid(3);

TrackMap tracks(std::initializer_list<std::pair<Udid, double>> entries) {
  TrackMap m;
  for (const auto& [u, rssi] : entries) m.emplace(u, SmoothedTrack{u, rssi, kT0});
  return m;
}

}  // namespace

TEST(PathLoss, ReferenceDistanceIdentity) {
  const PathLossModel m{-59.0, 2.0, 0.0};
  EXPECT_DOUBLE_EQ(rssi_from_distance(m, 1.0, 0.0), -59.0);
}

TEST(PathLoss, ClosedFormValues) {
  const PathLossModel m{-59.0, 2.0, 0.0};
  EXPECT_NEAR(rssi_from_distance(m, 2.0, 0.0), -65.0206, 1e-4);
  EXPECT_NEAR(rssi_from_distance(m, 10.0, 0.0), -79.0, 1e-12);
}

TEST(PathLoss, NoiseScalesBySigma) {
  const PathLossModel m{-59.0, 2.0, 2.0};
  EXPECT_DOUBLE_EQ(rssi_from_distance(m, 1.0, 1.5), -56.0);
}

TEST(PathLoss, NonPositiveDistanceIsDomainError) {
  const PathLossModel m;
  EXPECT_THROW(rssi_from_distance(m, 0.0), std::domain_error);
  EXPECT_THROW(rssi_from_distance(m, -1.0), std::domain_error);
}

TEST(PathLoss, StrictlyDecreasingInDistance) {
  const PathLossModel m{-59.0, 2.7, 0.0};
  double prev = rssi_from_distance(m, 0.01);
  for (double d = 0.02; d < 50.0; d *= 1.07) {
    const double v = rssi_from_distance(m, d);
    ASSERT_LT(v, prev) << d;
    prev = v;
  }
}

TEST(PathLoss, ModelValidation) {
  EXPECT_THROW((PathLossModel{-59, 0.0, 1}.validate()), std::domain_error);
  EXPECT_THROW((PathLossModel{-59, 2.0, -1}.validate()), std::domain_error);
}

TEST(Ingest, FirstSampleInitialises) {
  const auto t = ingest({}, {u1, -70.0, kT0}, {});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_DOUBLE_EQ(t.at(u1).ewma_rssi_dbm, -70.0);
}

TEST(Ingest, EwmaUpdate) {
  ScannerConfig cfg;
  cfg.ewma_alpha = 0.3;
  const auto t = ingest(tracks({{u1, -70.0}}), {u1, -60.0, kT0 + seconds{1}}, cfg);
  EXPECT_NEAR(t.at(u1).ewma_rssi_dbm, -67.0, 1e-12);
  EXPECT_EQ(t.at(u1).last_seen, kT0 + seconds{1});
}

TEST(Ingest, FixedPoint) {
  const auto t = ingest(tracks({{u1, -63.25}}), {u1, -63.25, kT0}, {});
  EXPECT_DOUBLE_EQ(t.at(u1).ewma_rssi_dbm, -63.25);
}

TEST(Ingest, OnlyAddsKeys) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 9);
  std::normal_distribution<double> rssi(-70, 8);
  TrackMap t;
  for (int i = 0; i < 300; ++i) {
    const auto before = t;
    t = ingest(t, {generate_udid(pick(rng)), rssi(rng), kT0 + seconds{i}}, {});
    for (const auto& [u, _] : before) ASSERT_TRUE(t.contains(u));
    ASSERT_LE(t.size(), before.size() + 1);
  }
}

TEST(EvictStale, Boundaries) {
  ScannerConfig cfg;
  cfg.stale_after_s = 5.0;
  TrackMap t;
  t.emplace(u1, SmoothedTrack{u1, -60, kT0});
  EXPECT_EQ(evict_stale(t, kT0, cfg).size(), 1u);
  EXPECT_EQ(evict_stale(t, kT0 + seconds{5}, cfg).size(), 1u);
  EXPECT_EQ(evict_stale(t, kT0 + seconds{6}, cfg).size(), 0u);
}

TEST(EvictStale, MixedMap) {
  ScannerConfig cfg;
  const auto now = kT0 + seconds{10};
  TrackMap t;
  t.emplace(u1, SmoothedTrack{u1, -60, now});
  t.emplace(u2, SmoothedTrack{u2, -60, now - seconds{3}});
  t.emplace(u3, SmoothedTrack{u3, -60, now - seconds{9}});
  const auto kept = evict_stale(t, now, cfg);
  EXPECT_EQ(kept.size(), 2u);
  EXPECT_FALSE(kept.contains(u3));
}

TEST(SelectNearest, EmptyClears) {
  ProximitySelection sel{u1, u2, 2};
  EXPECT_EQ(select_nearest(sel, {}, {}), ProximitySelection{});
}

TEST(SelectNearest, SingletonAndStrictMax) {
  EXPECT_EQ(select_nearest({}, tracks({{u1, -60}}), {}).current, u1);
  EXPECT_EQ(select_nearest({}, tracks({{u1, -60}, {u2, -80}}), {}).current, u1);
  EXPECT_EQ(select_nearest({}, tracks({{u1, -80}, {u2, -60}}), {}).current, u2);
}

TEST(SelectNearest, TieBreaksOnSmallestUdid) {
  const auto smaller = std::min(u1, u2);
  EXPECT_EQ(select_nearest({}, tracks({{u1, -60}, {u2, -60}}), {}).current, smaller);
}

TEST(SelectNearest, HysteresisHoldsIncumbent) {
  ScannerConfig cfg;
  cfg.hysteresis_db = 6;
  const auto sel = select_nearest({u1, {}, 0}, tracks({{u1, -70}, {u2, -65}}), cfg);
  EXPECT_EQ(sel.current, u1);
  EXPECT_EQ(sel.challenger_streak, 0);
  EXPECT_FALSE(sel.challenger.has_value());
}

TEST(SelectNearest, ChallengerTakesOverAfterConfirmScans) {
  ScannerConfig cfg;
  cfg.hysteresis_db = 6;
  cfg.confirm_scans = 3;
  const auto t = tracks({{u1, -70}, {u2, -62}});
  ProximitySelection sel{u1, {}, 0};
  sel = select_nearest(sel, t, cfg);
  EXPECT_EQ(sel.current, u1);
  EXPECT_EQ(sel.challenger, u2);
  EXPECT_EQ(sel.challenger_streak, 1);
  sel = select_nearest(sel, t, cfg);
  EXPECT_EQ(sel.current, u1);
  EXPECT_EQ(sel.challenger_streak, 2);
  sel = select_nearest(sel, t, cfg);
  EXPECT_EQ(sel.current, u2);
  EXPECT_FALSE(sel.challenger.has_value());
  EXPECT_EQ(sel.challenger_streak, 0);
}

TEST(SelectNearest, FailedCycleResetsStreak) {
  ScannerConfig cfg;
  ProximitySelection sel{u1, {}, 0};
  sel = select_nearest(sel, tracks({{u1, -70}, {u2, -62}}), cfg);
  sel = select_nearest(sel, tracks({{u1, -70}, {u2, -62}}), cfg);
  EXPECT_EQ(sel.challenger_streak, 2);
  sel = select_nearest(sel, tracks({{u1, -70}, {u2, -66}}), cfg);
  EXPECT_EQ(sel.challenger_streak, 0);
  sel = select_nearest(sel, tracks({{u1, -70}, {u2, -62}}), cfg);
  EXPECT_EQ(sel.challenger_streak, 1);
  EXPECT_EQ(sel.current, u1);
}

TEST(SelectNearest, VanishedIncumbentReselectsImmediately) {
  const auto sel = select_nearest({u1, u3, 1}, tracks({{u2, -75}, {u3, -65}}), {});
  EXPECT_EQ(sel.current, u3);
  EXPECT_EQ(sel.challenger_streak, 0);
}

TEST(SelectNearest, InvariantsUnderRandomInput) {
  ScannerConfig cfg;
  cfg.confirm_scans = 4;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> n(0, 4);
  std::normal_distribution<double> rssi(-70, 10);
  ProximitySelection sel;
  for (int i = 0; i < 5000; ++i) {
    TrackMap t;
    const int k = n(rng);
    for (int j = 0; j < k; ++j) {
      const auto u = generate_udid(static_cast<std::uint64_t>(j));
      t.emplace(u, SmoothedTrack{u, rssi(rng), kT0});
    }
    sel = select_nearest(sel, t, cfg);
    ASSERT_GE(sel.challenger_streak, 0);
    ASSERT_LE(sel.challenger_streak, cfg.confirm_scans);
    if (sel.challenger) ASSERT_NE(sel.challenger, sel.current);
    if (!t.empty()) ASSERT_TRUE(sel.current && t.contains(*sel.current));
  }
}

TEST(Scanner, NoiselessConvergesWithoutFlapping) {
  const PathLossModel m{-59, 2.0, 0.0};
  ProximityScanner scanner;
  const std::vector<std::pair<Udid, double>> devices{{u1, 2.4}, {u2, 0.9}, {u3, 1.7}};
  int changes = 0;
  std::optional<Udid> last;
  for (int s = 0; s < 200; ++s) {
    std::vector<Advertisement> ads;
    for (const auto& [u, d] : devices) ads.push_back({u, rssi_from_distance(m, d), kT0 + seconds{s}});
    const auto& sel = scanner.scan(ads, kT0 + seconds{s});
    if (s > 0 && sel.current != last) ++changes;
    last = sel.current;
  }
  EXPECT_EQ(last, u2);
  EXPECT_EQ(changes, 0);
}

TEST(Trace, RoundTripAndReplay) {
  std::vector<Advertisement> ads;
  for (int s = 0; s < 5; ++s) {
    ads.push_back({u1, -60.5, kT0 + seconds{s}});
    ads.push_back({u2, -72.25, kT0 + seconds{s}});
  }
  std::stringstream ss;
  write_trace(ss, ads);
  const auto first_line = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(json::parse(first_line),
            (json{{"ts", "2024-07-22T00:00:00Z"}, {"udid", u1.str()}, {"rssi_dbm", -60.5}}));
  const auto back = read_trace(ss);
  EXPECT_EQ(back, ads);
  const auto selections = replay_trace(back, {});
  ASSERT_EQ(selections.size(), 5u);
  for (const auto& s : selections) EXPECT_EQ(s.current, u1);
}

TEST(Trace, BadLineNamed) {
  std::stringstream ss;
  ss << json(Advertisement{u1, -60, kT0}).dump() << "\n{\"ts\": 3}\n";
  try {
    read_trace(ss);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}
