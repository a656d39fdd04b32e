#include "proxiclass/sim/classroom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace proxiclass::sim {

std::string_view to_string(AgentKind k) noexcept { return k == AgentKind::legacy ? "legacy" : "proximity"; }

AgentKind agent_from_string(std::string_view s) {
  if (s == "legacy") return AgentKind::legacy;
  if (s == "proximity") return AgentKind::proximity;
  throw std::invalid_argument("agent must be legacy|proximity, got \"" + std::string(s) + "\"");
}

ClassroomLayout ClassroomLayout::grid(std::span<const std::string> student_ids, int columns, double spacing_x_m,
                                      double spacing_y_m, double margin_m) {
  if (columns < 1) throw std::domain_error("layout: columns must be >= 1");
  ClassroomLayout layout;
  const auto n = static_cast<int>(student_ids.size());
  const int cols = std::min(columns, std::max(n, 1));
  const int rows = (n + cols - 1) / cols;
  layout.width_m = 2 * margin_m + (cols - 1) * spacing_x_m;
  layout.depth_m = 2 * margin_m + std::max(rows - 1, 0) * spacing_y_m;
  for (int i = 0; i < n; ++i) {
    layout.desks.push_back({student_ids[static_cast<std::size_t>(i)], margin_m + (i % cols) * spacing_x_m,
                            margin_m + (i / cols) * spacing_y_m});
  }
  return layout;
}

std::vector<std::string> SimSetup::errors() const {
  std::vector<std::string> errs;
  auto check = [&](bool ok, std::string msg) {
    if (!ok) errs.push_back(std::move(msg));
  };
  check(layout.width_m > 0.0, "layout.width_m must be > 0");
  check(layout.depth_m > 0.0, "layout.depth_m must be > 0");
  std::set<std::string> desk_students;
  for (const auto& d : layout.desks) {
    check(d.x_m >= 0.0 && d.x_m <= layout.width_m && d.y_m >= 0.0 && d.y_m <= layout.depth_m,
          "layout: desk of " + d.student_id + " lies outside the room");
    check(desk_students.insert(d.student_id).second, "layout: more than one desk for " + d.student_id);
  }
  std::set<std::string> roster_ids;
  for (const auto& s : roster) {
    roster_ids.insert(s.student_id);
    check(desk_students.contains(s.student_id), "roster: student " + s.student_id + " has no desk");
    check(s.udid.has_value(), "roster: student " + s.student_id + " has no registered udid");
  }
  check(roster_ids.size() == roster.size(), "roster: duplicate student ids");
  check(roster_ids.size() == desk_students.size(), "roster and layout desks must match");
  check(interaction.legacy_steps_per_record >= 1, "interaction.legacy_steps_per_record must be >= 1");
  check(interaction.proximity_steps_per_record >= 1, "interaction.proximity_steps_per_record must be >= 1");
  check(interaction.proximity_steps_per_record <= interaction.legacy_steps_per_record,
        "interaction.proximity_steps_per_record must not exceed legacy_steps_per_record");
  check(interaction.seconds_per_step > 0.0, "interaction.seconds_per_step must be > 0");
  check(session.duration_s > 0.0, "session.duration_s must be > 0");
  check(session.teaching_fraction >= 0.0 && session.teaching_fraction <= 1.0,
        "session.teaching_fraction must be in [0,1]");
  check(session.event_rate_per_student_per_session >= 0.0 &&
            std::isfinite(session.event_rate_per_student_per_session),
        "session.event_rate_per_student_per_session must be >= 0");
  check(session.scan_interval_s > 0.0, "session.scan_interval_s must be > 0");
  check(session.patrol.walk_speed_mps > 0.0, "session.patrol.walk_speed_mps must be > 0");
  check(session.patrol.dwell_s >= 0.0, "session.patrol.dwell_s must be >= 0");
  check(session.patrol.stand_off_m > 0.0, "session.patrol.stand_off_m must be > 0");
  try {
    path_loss.validate();
  } catch (const std::exception& e) {
    errs.emplace_back(e.what());
  }
  check(scanner.ewma_alpha > 0.0 && scanner.ewma_alpha <= 1.0, "scanner.ewma_alpha must be in (0,1]");
  check(scanner.stale_after_s > 0.0, "scanner.stale_after_s must be > 0");
  check(scanner.hysteresis_db >= 0.0, "scanner.hysteresis_db must be >= 0");
  check(scanner.confirm_scans >= 1, "scanner.confirm_scans must be >= 1");
  return errs;
}

void SimSetup::validate() const {
  const auto errs = errors();
  if (errs.empty()) return;
  std::string msg = "invalid simulation setup:";
  for (const auto& e : errs) msg += "\n  - " + e;
  throw std::domain_error(msg);
}

SimSetup default_setup(std::size_t n_students) {
  SimSetup setup;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n_students; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "S%03zu", i + 1);
    ids.emplace_back(id);
    Student s{id, "Student " + std::string(id + 1), 8, generate_udid(0x5d0000 + i)};
    setup.roster.push_back(std::move(s));
  }
  setup.layout = ClassroomLayout::grid(ids, 5, 1.5, 2.0);
  return setup;
}

namespace {

std::uint64_t fnv1a(std::string_view a, std::string_view b) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  mix(a);
  mix("\x1f");
  mix(b);
  return h;
}

}  // namespace

int true_rating(std::string_view student_id, const BehaviorCategory& category) {
  const auto width = static_cast<std::uint64_t>(category.rating_domain.hi - category.rating_domain.lo + 1);
  return category.rating_domain.lo + static_cast<int>(fnv1a(student_id, category.code) % width);
}

std::vector<BehaviorEvent> generate_events(const SimSetup& setup, const SessionContext& ctx) {
  std::mt19937_64 rng(setup.session.rng_seed);
  std::vector<BehaviorEvent> events;
  const double rate = setup.session.event_rate_per_student_per_session;
  const auto& categories = setup.taxonomy.categories();
  if (rate <= 0.0) return events;
  std::poisson_distribution<int> count(rate);
  std::uniform_real_distribution<double> when(0.0, setup.session.duration_s);
  std::uniform_int_distribution<std::size_t> pick(0, categories.size() - 1);
  for (const auto& student : setup.roster) {
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
      const double t = when(rng);
      const auto& cat = categories[pick(rng)];
      events.push_back({student.student_id, cat.code, true_rating(student.student_id, cat), add_seconds(ctx.start, t)});
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const BehaviorEvent& a, const BehaviorEvent& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    return a.student_id < b.student_id;
  });
  return events;
}

std::pair<double, double> patrol_position(const ClassroomLayout& layout, const PatrolConfig& patrol, double t_s) {
  if (layout.desks.empty()) return {0.0, 0.0};

  // Rows by desk y; serpentine order within rows.
  std::map<double, std::vector<const Desk*>> rows;
  for (const auto& d : layout.desks) rows[d.y_m].push_back(&d);
  std::vector<std::pair<double, double>> stops;
  bool reverse = false;
  for (auto& [y, row] : rows) {
    std::sort(row.begin(), row.end(), [&](const Desk* a, const Desk* b) {
      return reverse ? a->x_m > b->x_m : a->x_m < b->x_m;
    });
    for (const auto* d : row) stops.emplace_back(d->x_m, std::max(0.0, d->y_m - patrol.stand_off_m));
    reverse = !reverse;
  }
  if (stops.size() == 1) return stops.front();

  auto walk_s = [&](std::size_t i) {
    const auto& a = stops[i];
    const auto& b = stops[(i + 1) % stops.size()];
    return std::hypot(b.first - a.first, b.second - a.second) / patrol.walk_speed_mps;
  };
  double period = 0.0;
  for (std::size_t i = 0; i < stops.size(); ++i) period += patrol.dwell_s + walk_s(i);
  if (period <= 0.0) return stops.front();

  double t = std::fmod(std::max(t_s, 0.0), period);
  for (std::size_t i = 0; i < stops.size(); ++i) {
    if (t < patrol.dwell_s) return stops[i];
    t -= patrol.dwell_s;
    const double w = walk_s(i);
    if (t < w) {
      const double f = t / w;
      const auto& a = stops[i];
      const auto& b = stops[(i + 1) % stops.size()];
      return {a.first + f * (b.first - a.first), a.second + f * (b.second - a.second)};
    }
    t -= w;
  }
  return stops.front();
}

SimOutcome simulate_events(const SimSetup& setup, AgentKind agent, const SessionContext& ctx,
                           std::span<const BehaviorEvent> events, sis::SisStore& store) {
  setup.validate();
  const auto& session = setup.session;
  const double cost_s = setup.interaction.capture_cost_s(agent);
  const double budget_s = session.capture_budget_s();
  constexpr double kEps = 1e-9;

  std::map<Udid, std::string> udid_owner;
  for (const auto& s : setup.roster) udid_owner.emplace(*s.udid, s.student_id);

  SimOutcome out;
  out.agent_kind = agent;
  out.events_generated = events.size();

  std::mt19937_64 noise_rng(session.rng_seed ^ 0xa5a5a5a5a5a5a5a5ull);
  std::normal_distribution<double> noise(0.0, 1.0);
  proximity::ProximityScanner scanner(setup.scanner);
  std::vector<proximity::Advertisement> ads;
  ads.reserve(setup.layout.desks.size());
  std::map<std::string, const Desk*> desk_of;
  for (const auto& d : setup.layout.desks) desk_of.emplace(d.student_id, &d);

  std::deque<BehaviorEvent> pending;
  std::size_t next = 0;
  double spent_s = 0.0;
  double busy_until_s = 0.0;
  double latency_sum = 0.0;

  const auto n_ticks = static_cast<long long>(std::floor(session.duration_s / session.scan_interval_s + kEps));
  for (long long tick = 0; tick <= n_ticks; ++tick) {
    const double t_s = static_cast<double>(tick) * session.scan_interval_s;
    const Timestamp now = add_seconds(ctx.start, t_s);
    while (next < events.size() && events[next].ts <= now) pending.push_back(events[next++]);

    std::optional<std::string> nearest;
    if (agent == AgentKind::proximity) {
      const auto [tx, ty] = patrol_position(setup.layout, session.patrol, t_s);
      ads.clear();
      for (const auto& s : setup.roster) {
        const auto* d = desk_of.at(s.student_id);
        const double dist = std::max(0.05, std::hypot(d->x_m - tx, d->y_m - ty));
        ads.push_back({*s.udid, proximity::rssi_from_distance(setup.path_loss, dist, noise(noise_rng)), now});
      }
      if (session.record_trace) out.trace.insert(out.trace.end(), ads.begin(), ads.end());
      const auto& sel = scanner.scan(ads, now);
      if (sel.current) nearest = udid_owner.at(*sel.current);
    }

    while (t_s + kEps >= busy_until_s && !pending.empty()) {
      auto it = pending.begin();
      if (agent == AgentKind::proximity) {
        if (!nearest) break;
        it = std::find_if(pending.begin(), pending.end(),
                          [&](const BehaviorEvent& e) { return e.student_id == *nearest; });
        if (it == pending.end()) break;
      }
      const BehaviorEvent event = *it;
      pending.erase(it);
      if (spent_s + cost_s > budget_s + kEps) continue;  // no slack left: dropped

      const auto* cat = setup.taxonomy.find(event.category_code);
      char rid[64];
      std::snprintf(rid, sizeof rid, "%s-R%04zu", ctx.lesson_id.c_str(), out.dataset.size() + 1);
      BehaviorRecord r;
      r.record_id = rid;
      r.student_id = event.student_id;
      r.teacher_id = ctx.teacher_id;
      r.lesson_id = ctx.lesson_id;
      r.category_code = event.category_code;
      r.rating = event.rating;
      r.comment = (cat ? cat->label : event.category_code) + " observed in class";
      r.event_ts = event.ts;
      r.capture_ts = add_seconds(now, cost_s);
      store.write_record(r);
      latency_sum += r.capture_latency_s();
      out.dataset.push_back(std::move(r));
      spent_s += cost_s;
      busy_until_s = t_s + cost_s;
    }
  }

  out.records_captured = out.dataset.size();
  out.total_interactions = out.records_captured * static_cast<std::size_t>(setup.interaction.steps(agent));
  out.mean_capture_latency_s =
      out.records_captured == 0 ? 0.0 : latency_sum / static_cast<double>(out.records_captured);
  return out;
}

SimOutcome run_session(const SimSetup& setup, AgentKind agent, const SessionContext& ctx, sis::SisStore& store) {
  setup.validate();
  const auto events = generate_events(setup, ctx);
  return simulate_events(setup, agent, ctx, events, store);
}

std::uint64_t session_seed(std::uint64_t base_seed, int session_index) noexcept {
  return base_seed + static_cast<std::uint64_t>(session_index) * 0x9e3779b97f4a7c15ull;
}

std::vector<Teacher> term_teachers(const TermShape& shape) {
  std::vector<Teacher> out;
  for (int i = 0; i < shape.n_teachers; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "T%02d", i + 1);
    out.push_back({id, "Teacher " + std::string(id + 1)});
  }
  return out;
}

SessionContext session_context(const TermShape& shape, int session_index) {
  char lesson[16];
  std::snprintf(lesson, sizeof lesson, "L%03d", session_index + 1);
  char teacher[16];
  std::snprintf(teacher, sizeof teacher, "T%02d", session_index % std::max(shape.n_teachers, 1) + 1);
  return {lesson, teacher, add_seconds(shape.term_start, session_index * shape.days_between_sessions * 86400.0)};
}

Lesson session_lesson(const SimSetup& setup, const TermShape& shape, int session_index) {
  const auto ctx = session_context(shape, session_index);
  Lesson l{ctx.lesson_id, ctx.teacher_id, {}, ctx.start, add_seconds(ctx.start, setup.session.duration_s)};
  for (const auto& s : setup.roster) l.roster.push_back(s.student_id);
  return l;
}

void prepare_store(sis::SisStore& store, const SimSetup& setup, const TermShape& shape, int n_sessions) {
  if (shape.n_teachers < 1) throw std::domain_error("term: n_teachers must be >= 1");
  store.set_taxonomy(setup.taxonomy);
  for (const auto& s : setup.roster) store.add_student(s);
  for (const auto& t : term_teachers(shape)) store.add_teacher(t);
  for (int i = 0; i < n_sessions; ++i) store.add_lesson(session_lesson(setup, shape, i));
}

SimOutcome run_session(const SimSetup& setup, AgentKind agent) {
  setup.validate();
  const TermShape shape;
  sis::SisStore store;
  prepare_store(store, setup, shape, 1);
  return run_session(setup, agent, session_context(shape, 0), store);
}

TermOutcome run_term(int n_sessions, const SimSetup& base, AgentKind agent, const TermShape& shape) {
  if (n_sessions < 1) throw std::domain_error("run_term: n_sessions must be >= 1");
  base.validate();
  sis::SisStore store;
  prepare_store(store, base, shape, n_sessions);

  TermOutcome term;
  term.aggregate.agent_kind = agent;
  double latency_sum = 0.0;
  for (int i = 0; i < n_sessions; ++i) {
    SimSetup setup = base;
    setup.session.rng_seed = session_seed(base.session.rng_seed, i);
    const auto ctx = session_context(shape, i);
    auto outcome = run_session(setup, agent, ctx, store);
    term.sessions.push_back({ctx.lesson_id, ctx.teacher_id, setup.session.rng_seed, outcome.records_captured,
                             outcome.events_generated, outcome.total_interactions,
                             outcome.mean_capture_latency_s});
    auto& agg = term.aggregate;
    agg.records_captured += outcome.records_captured;
    agg.events_generated += outcome.events_generated;
    agg.total_interactions += outcome.total_interactions;
    latency_sum += outcome.mean_capture_latency_s * static_cast<double>(outcome.records_captured);
    std::move(outcome.dataset.begin(), outcome.dataset.end(), std::back_inserter(agg.dataset));
    std::move(outcome.trace.begin(), outcome.trace.end(), std::back_inserter(agg.trace));
  }
  if (term.aggregate.records_captured > 0)
    term.aggregate.mean_capture_latency_s = latency_sum / static_cast<double>(term.aggregate.records_captured);
  return term;
}

void DefectRates::validate() const {
  const std::pair<const char*, double> rates[] = {
      {"missing_comment", missing_comment}, {"invalid_code", invalid_code}, {"late_capture", late_capture}};
  for (const auto& [name, p] : rates)
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string("defects.") + name + " must be in [0,1]");
  if (!(late_delay_min_s >= 0.0 && late_delay_min_s <= late_delay_max_s))
    throw std::domain_error("defect late delay range must satisfy 0 <= min <= max");
}

std::vector<BehaviorRecord> degrade_dataset(std::span<const BehaviorRecord> records, const DefectRates& rates,
                                            std::uint64_t seed) {
  rates.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> delay(rates.late_delay_min_s, rates.late_delay_max_s);
  std::vector<BehaviorRecord> out(records.begin(), records.end());
  for (auto& r : out) {
    // Fixed number of draws per record keeps defects independent of each other.
    const double d_comment = u(rng);
    const double d_code = u(rng);
    const double d_late = u(rng);
    const double late_by = delay(rng);
    if (d_comment < rates.missing_comment) r.comment.reset();
    if (d_code < rates.invalid_code) r.category_code = std::string(kInvalidCategoryCode);
    if (d_late < rates.late_capture) r.capture_ts = add_seconds(r.capture_ts, late_by);
  }
  return out;
}

}  // namespace proxiclass::sim
