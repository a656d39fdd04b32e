#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "proxiclass/core/domain.hpp"
#include "proxiclass/proximity/proximity.hpp"
#include "proxiclass/sis/store.hpp"

namespace proxiclass::sim {

enum class AgentKind { legacy, proximity };

std::string_view to_string(AgentKind k) noexcept;
AgentKind agent_from_string(std::string_view s);  // throws std::invalid_argument

struct Desk {
  std::string student_id;
  double x_m = 0.0;
  double y_m = 0.0;
};

struct ClassroomLayout {
  double width_m = 0.0;
  double depth_m = 0.0;
  std::vector<Desk> desks;

  // Row-major grid with `margin_m` clearance on every wall.
  static ClassroomLayout grid(std::span<const std::string> student_ids, int columns, double spacing_x_m,
                              double spacing_y_m, double margin_m = 1.0);
};

struct InteractionModel {
  // open list, search, select student, pick category, set rating, confirm
  int legacy_steps_per_record = 6;
  // pick category, confirm
  int proximity_steps_per_record = 2;
  double seconds_per_step = 4.0;

  int steps(AgentKind k) const noexcept {
    return k == AgentKind::legacy ? legacy_steps_per_record : proximity_steps_per_record;
  }
  double capture_cost_s(AgentKind k) const noexcept { return steps(k) * seconds_per_step; }
};

// Serpentine walk over desk rows, looping back to the first desk.
struct PatrolConfig {
  double walk_speed_mps = 1.0;
  double dwell_s = 10.0;
  // Teacher stands this far in front of the desk.
  double stand_off_m = 0.4;
};

struct SessionConfig {
  double duration_s = 2400.0;
  // Fraction of the lesson unavailable for data entry.
  double teaching_fraction = 0.85;
  double event_rate_per_student_per_session = 1.5;
  std::uint64_t rng_seed = 1;
  double scan_interval_s = 1.0;
  PatrolConfig patrol;
  bool record_trace = false;

  double capture_budget_s() const noexcept { return (1.0 - teaching_fraction) * duration_s; }
};

struct SimSetup {
  ClassroomLayout layout;
  std::vector<Student> roster;
  BehaviorTaxonomy taxonomy = BehaviorTaxonomy::standard();
  InteractionModel interaction;
  SessionConfig session;
  proximity::PathLossModel path_loss;
  proximity::ScannerConfig scanner;

  // Every violated constraint, empty when the setup is usable.
  std::vector<std::string> errors() const;
  // Throws std::domain_error listing every error.
  void validate() const;
};

// `n_students` students with registered udids on a 5-column grid.
SimSetup default_setup(std::size_t n_students = 20);

struct BehaviorEvent {
  std::string student_id;
  std::string category_code;
  int rating = 0;
  Timestamp ts;
};

struct SessionContext {
  std::string lesson_id;
  std::string teacher_id;
  Timestamp start;
};

struct SimOutcome {
  AgentKind agent_kind = AgentKind::legacy;
  std::size_t records_captured = 0;
  std::size_t events_generated = 0;
  std::size_t total_interactions = 0;
  double mean_capture_latency_s = 0.0;
  std::vector<BehaviorRecord> dataset;
  std::vector<proximity::Advertisement> trace;

  std::size_t events_dropped() const noexcept { return events_generated - records_captured; }
};

// The rating a student "deserves" for a category; stable across teachers and
// sessions so that clean data agrees with itself.
int true_rating(std::string_view student_id, const BehaviorCategory& category);

// Poisson event counts per student, uniform event times, seeded by
// session.rng_seed; sorted by time then student.
std::vector<BehaviorEvent> generate_events(const SimSetup& setup, const SessionContext& ctx);

// Teacher position along the patrol at `t_s` seconds into the lesson.
std::pair<double, double> patrol_position(const ClassroomLayout& layout, const PatrolConfig& patrol, double t_s);

// Steps the lesson at the scan cadence. Captured records go through
// store.write_record, which must already know the roster, teacher and lesson.
SimOutcome simulate_events(const SimSetup& setup, AgentKind agent, const SessionContext& ctx,
                           std::span<const BehaviorEvent> events, sis::SisStore& store);

SimOutcome run_session(const SimSetup& setup, AgentKind agent, const SessionContext& ctx, sis::SisStore& store);

struct TermShape {
  int n_teachers = 7;
  Timestamp term_start = Timestamp{std::chrono::sys_days{std::chrono::year{2024} / 7 / 22}} + std::chrono::hours{9};
  double days_between_sessions = 1.0;
};

std::uint64_t session_seed(std::uint64_t base_seed, int session_index) noexcept;
std::vector<Teacher> term_teachers(const TermShape& shape);
SessionContext session_context(const TermShape& shape, int session_index);
Lesson session_lesson(const SimSetup& setup, const TermShape& shape, int session_index);

// Registers taxonomy, roster, teachers and `n_sessions` lessons in `store`.
void prepare_store(sis::SisStore& store, const SimSetup& setup, const TermShape& shape, int n_sessions);

// Convenience: a fresh in-memory store holding session 0 of the default term.
SimOutcome run_session(const SimSetup& setup, AgentKind agent);

struct SessionSummary {
  std::string lesson_id;
  std::string teacher_id;
  std::uint64_t seed = 0;
  std::size_t records_captured = 0;
  std::size_t events_generated = 0;
  std::size_t total_interactions = 0;
  double mean_capture_latency_s = 0.0;
};

struct TermOutcome {
  SimOutcome aggregate;
  std::vector<SessionSummary> sessions;
};

// Session i uses session_seed(base.session.rng_seed, i) and session_context(shape, i).
TermOutcome run_term(int n_sessions, const SimSetup& base, AgentKind agent, const TermShape& shape = {});

struct DefectRates {
  double missing_comment = 0.3;
  double invalid_code = 0.2;
  double late_capture = 0.4;
  // Late captures are delayed by a uniform draw from this range.
  double late_delay_min_s = 3600.0;
  double late_delay_max_s = 86400.0;

  void validate() const;  // throws std::domain_error
};

inline constexpr std::string_view kInvalidCategoryCode = "UNCLASSIFIED";

// Independent seeded per-record defect injection; order and count preserved.
std::vector<BehaviorRecord> degrade_dataset(std::span<const BehaviorRecord> records, const DefectRates& rates,
                                            std::uint64_t seed);

}  // namespace proxiclass::sim
