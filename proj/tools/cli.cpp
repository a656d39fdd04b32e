#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "proxiclass/core/dataset_io.hpp"
#include "proxiclass/proximity/trace.hpp"
#include "proxiclass/quality/quality.hpp"
#include "proxiclass/reports/ci_reports.hpp"
#include "proxiclass/sim/config.hpp"
#include "proxiclass/sis/http_api.hpp"

namespace proxiclass::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_shutdown{false};

constexpr const char* kStoreEnv = "PROXICLASS_STORE";

// Raised for bad configuration or input files (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " not found: " + path);
}

std::optional<std::string> store_from_env() {
  if (const char* v = std::getenv(kStoreEnv); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

// ---------------------------------------------------------------- serve

struct ServeOptions {
  std::string config;
  std::string store;
  std::string host;
  int port = -1;
  std::string port_file;
};

int cmd_serve(const ServeOptions& opt, std::ostream& out, std::ostream& err) {
  json cfg = json::object();
  if (!opt.config.empty()) {
    require_file(opt.config, "config file");
    cfg = read_json_file(opt.config);
  }
  sis::ServiceSettings settings;
  proximity::ScannerConfig scanner;
  try {
    if (cfg.contains("quality")) settings.quality = cfg.at("quality").get<quality::QualityConfig>();
    if (cfg.contains("policy")) settings.policy = cfg.at("policy").get<reports::BestPracticePolicy>();
    if (auto it = cfg.find("scanner"); it != cfg.end()) {
      scanner.ewma_alpha = it->value("ewma_alpha", scanner.ewma_alpha);
      scanner.stale_after_s = it->value("stale_after_s", scanner.stale_after_s);
      scanner.hysteresis_db = it->value("hysteresis_db", scanner.hysteresis_db);
      scanner.confirm_scans = it->value("confirm_scans", scanner.confirm_scans);
    }
    settings.quality.validate();
    settings.policy.validate();
    scanner.validate();
  } catch (const std::exception& e) {
    throw UsageError(opt.config + ": " + e.what());
  }

  std::string store_path = cfg.value("store", std::string{});
  if (auto env = store_from_env()) store_path = *env;
  if (!opt.store.empty()) store_path = opt.store;
  const std::string host = !opt.host.empty() ? opt.host : cfg.value("host", std::string("127.0.0.1"));
  const int port = opt.port >= 0 ? opt.port : cfg.value("port", 8080);

  std::unique_ptr<sis::SisStore> store;
  try {
    store = store_path.empty() ? std::make_unique<sis::SisStore>() : std::make_unique<sis::SisStore>(store_path);
  } catch (const std::exception& e) {
    err << "serve: " << e.what() << '\n';
    return kExitFailure;
  }
  sis::ProximityBoard board(scanner);
  sis::SisHttpServer server(*store, board, settings);

  // Reset before the port is published so an early request_shutdown() sticks.
  g_shutdown = false;
  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
    if (bound < 0) {
      err << "serve: cannot bind " << host << '\n';
      return kExitFailure;
    }
  } else if (!server.bind(host, port)) {
    err << "serve: cannot bind " << host << ":" << port << '\n';
    return kExitFailure;
  }
  if (!opt.port_file.empty()) {
    std::ofstream pf(opt.port_file);
    pf << bound << '\n';
  }
  out << "serving on http://" << host << ":" << bound
      << (store_path.empty() ? std::string(" (in-memory store)") : " (store " + store_path + ")") << std::endl;

  std::thread watcher([&] {
    while (!g_shutdown) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
  });
  const bool ok = server.listen_after_bind();
  g_shutdown = true;
  watcher.join();
  if (!ok) {
    err << "serve: listener failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config;
  std::string agent = "both";
  std::optional<std::uint64_t> seed;
  std::optional<int> sessions;
  std::string out_dir = "sim_out";
  bool trace = false;
  bool degrade = false;
};

double interactions_per_record(const sim::SimOutcome& o) {
  return o.records_captured == 0 ? 0.0
                                 : static_cast<double>(o.total_interactions) / static_cast<double>(o.records_captured);
}

json outcome_json(const sim::TermOutcome& term, const std::string& dataset_file) {
  const auto& a = term.aggregate;
  json sessions = json::array();
  for (const auto& s : term.sessions) {
    sessions.push_back({{"lesson_id", s.lesson_id},
                        {"teacher_id", s.teacher_id},
                        {"seed", s.seed},
                        {"records_captured", s.records_captured},
                        {"events_generated", s.events_generated},
                        {"total_interactions", s.total_interactions},
                        {"mean_capture_latency_s", s.mean_capture_latency_s}});
  }
  return json{{"agent_kind", std::string(sim::to_string(a.agent_kind))},
              {"records_captured", a.records_captured},
              {"events_generated", a.events_generated},
              {"events_dropped", a.events_dropped()},
              {"total_interactions", a.total_interactions},
              {"interactions_per_record", interactions_per_record(a)},
              {"mean_capture_latency_s", a.mean_capture_latency_s},
              {"dataset", dataset_file},
              {"sessions", sessions}};
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
  json cfg_json = json::object();
  if (!opt.config.empty()) {
    require_file(opt.config, "config file");
    cfg_json = read_json_file(opt.config);
  }
  if (!cfg_json.is_object()) throw UsageError(opt.config + ": configuration must be a JSON object");
  if (opt.seed) cfg_json["seed"] = *opt.seed;
  if (opt.sessions) cfg_json["sessions"] = *opt.sessions;
  const auto cfg = sim::sim_config_from_json(cfg_json);

  std::vector<sim::AgentKind> agents;
  if (opt.agent == "both") {
    agents = {sim::AgentKind::legacy, sim::AgentKind::proximity};
  } else {
    try {
      agents = {sim::agent_from_string(opt.agent)};
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }

  const fs::path dir = opt.out_dir;
  fs::create_directories(dir);
  write_json_file(dir / "config.json", sim::sim_config_to_json(cfg));
  write_json_file(dir / "taxonomy.json", json(cfg.setup.taxonomy));
  write_json_file(dir / "roster.json", json(cfg.setup.roster));
  std::vector<std::string> roster;
  for (const auto& s : cfg.setup.roster) roster.push_back(s.student_id);

  const auto& setup = cfg.setup;

  json summary{{"seed", cfg.setup.session.rng_seed}, {"sessions", cfg.sessions}};
  std::map<sim::AgentKind, sim::TermOutcome> results;
  for (auto agent : agents) {
    const std::string name(sim::to_string(agent));
    auto term = sim::run_term(cfg.sessions, setup, agent, cfg.term);
    const std::string dataset_file = name + ".dataset.jsonl";
    write_dataset(dir / dataset_file, term.aggregate.dataset);
    write_json_file(dir / (name + ".outcome.json"), outcome_json(term, dataset_file));
    if (opt.trace && agent == sim::AgentKind::proximity) {
      // First lesson only; a whole term runs to ~10^6 lines. Replaying the
      // lesson reproduces it exactly since it owns its seed.
      auto first = setup;
      first.session.record_trace = true;
      first.session.rng_seed = sim::session_seed(setup.session.rng_seed, 0);
      sis::SisStore scratch;
      sim::prepare_store(scratch, first, cfg.term, 1);
      const auto lesson = sim::run_session(first, agent, sim::session_context(cfg.term, 0), scratch);
      std::ofstream tf(dir / (name + ".trace.jsonl"), std::ios::binary | std::ios::trunc);
      proximity::write_trace(tf, lesson.trace);
    }
    const auto report = quality::quality_report(term.aggregate.dataset, cfg.setup.taxonomy, roster, cfg.quality);
    json entry{{"records_captured", term.aggregate.records_captured},
               {"events_generated", term.aggregate.events_generated},
               {"total_interactions", term.aggregate.total_interactions},
               {"interactions_per_record", interactions_per_record(term.aggregate)},
               {"mean_capture_latency_s", term.aggregate.mean_capture_latency_s},
               {"quality", report}};
    if (opt.degrade) {
      const auto degraded = sim::degrade_dataset(term.aggregate.dataset, cfg.defects, cfg.setup.session.rng_seed);
      write_dataset(dir / (name + ".degraded.jsonl"), degraded);
      entry["degraded_quality"] = quality::quality_report(degraded, cfg.setup.taxonomy, roster, cfg.quality);
    }
    summary[name] = entry;
    out << name << ": " << term.aggregate.records_captured << " records from " << term.aggregate.events_generated
        << " events, " << term.aggregate.total_interactions << " interactions\n";
    results.emplace(agent, std::move(term));
  }

  if (results.size() == 2) {
    const auto& legacy = results.at(sim::AgentKind::legacy).aggregate;
    const auto& prox = results.at(sim::AgentKind::proximity).aggregate;
    const double ipr_prox = interactions_per_record(prox);
    const double ratio = ipr_prox == 0.0 ? 0.0 : interactions_per_record(legacy) / ipr_prox;
    const double records_ratio = legacy.records_captured == 0
                                     ? 0.0
                                     : static_cast<double>(prox.records_captured) /
                                           static_cast<double>(legacy.records_captured);
    summary["interactions_per_record_ratio"] = ratio;
    summary["record_count_ratio"] = records_ratio;
    out << "interactions per record legacy:proximity = " << ratio << ", record count ratio = " << records_ratio
        << '\n';
  }
  write_json_file(dir / "summary.json", summary);
  return kExitOk;
}

// -------------------------------------------------------- quality/compare

struct QualityOptions {
  std::string dataset;
  std::string taxonomy;
  std::string roster;
  std::string config;
  std::string output;
};

quality::QualityConfig load_quality_config(const std::string& path) {
  if (path.empty()) return {};
  require_file(path, "quality config");
  auto j = read_json_file(path);
  try {
    auto cfg = (j.contains("quality") ? j.at("quality") : j).get<quality::QualityConfig>();
    cfg.validate();
    return cfg;
  } catch (const std::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void emit(const json& j, const std::string& output, std::ostream& out) {
  if (output.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_json_file(output, j);
  }
}

BehaviorTaxonomy taxonomy_or_default(const std::string& path) {
  if (path.empty()) return BehaviorTaxonomy::standard();
  require_file(path, "taxonomy file");
  return read_taxonomy(path);
}

std::vector<std::string> roster_or_empty(const std::string& path) {
  if (path.empty()) return {};
  require_file(path, "roster file");
  return read_roster(path);
}

int cmd_quality(const QualityOptions& opt, std::ostream& out) {
  require_file(opt.dataset, "dataset");
  const auto taxonomy = taxonomy_or_default(opt.taxonomy);
  const auto roster = roster_or_empty(opt.roster);
  const auto cfg = load_quality_config(opt.config);
  const auto records = read_dataset(opt.dataset);
  emit(json(quality::quality_report(records, taxonomy, roster, cfg)), opt.output, out);
  return kExitOk;
}

struct CompareOptions {
  std::string legacy;
  std::string fresh;
  std::string taxonomy;
  std::string roster;
  std::string config;
  std::string output;
};

// A file holding a single QualityReport object is used as is; anything else is
// read as a record dataset and scored.
quality::QualityReport report_for(const std::string& path, const BehaviorTaxonomy& taxonomy,
                                  const std::vector<std::string>& roster, const quality::QualityConfig& cfg) {
  require_file(path, "input");
  std::ifstream in(path);
  const auto whole = json::parse(in, nullptr, false);
  if (!whole.is_discarded() && whole.is_object() && whole.contains("n_records")) {
    try {
      return whole.get<quality::QualityReport>();
    } catch (const std::exception& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  return quality::quality_report(read_dataset(path), taxonomy, roster, cfg);
}

int cmd_compare(const CompareOptions& opt, std::ostream& out) {
  const auto taxonomy = taxonomy_or_default(opt.taxonomy);
  const auto roster = roster_or_empty(opt.roster);
  const auto cfg = load_quality_config(opt.config);
  const auto legacy = report_for(opt.legacy, taxonomy, roster, cfg);
  const auto fresh = report_for(opt.fresh, taxonomy, roster, cfg);
  const auto cmp = quality::compare(legacy, fresh);
  json j = cmp;
  j["legacy"] = legacy;
  j["new"] = fresh;
  emit(j, opt.output, out);
  return cmp.dominance ? kExitOk : kExitFailure;
}

// ------------------------------------------------------------ seed-data

struct SeedOptions {
  std::string store;
  std::uint64_t seed = 2024;
  int classes = 30;
  int teachers = 94;
  int sessions = 4;
  int students_per_class = 20;
};

int cmd_seed_data(const SeedOptions& opt, std::ostream& out, std::ostream& err) {
  std::string store_path = opt.store;
  if (store_path.empty()) {
    if (auto env = store_from_env()) store_path = *env;
  }
  if (store_path.empty()) throw UsageError("seed-data: no store path (use --store or " + std::string(kStoreEnv) + ")");
  if (opt.classes < 1 || opt.teachers < 1 || opt.sessions < 1 || opt.students_per_class < 1)
    throw UsageError("seed-data: counts must be >= 1");

  std::unique_ptr<sis::SisStore> store;
  try {
    store = std::make_unique<sis::SisStore>(store_path);
  } catch (const std::exception& e) {
    err << "seed-data: " << e.what() << '\n';
    return kExitFailure;
  }
  if (store->record_count() > 0 || !store->snapshot().students.empty()) {
    err << "seed-data: store " << store_path << " already holds data\n";
    return kExitFailure;
  }

  const sim::TermShape shape{opt.teachers};
  store->set_taxonomy(BehaviorTaxonomy::standard());
  for (const auto& t : sim::term_teachers(shape)) store->add_teacher(t);

  std::size_t udid_index = 0;
  for (int c = 1; c <= opt.classes; ++c) {
    char cls[16];
    std::snprintf(cls, sizeof cls, "C%02d", c);
    sim::SimSetup setup;
    setup.session.rng_seed = opt.seed;
    std::vector<std::string> ids;
    for (int i = 1; i <= opt.students_per_class; ++i) {
      char sid[32];
      std::snprintf(sid, sizeof sid, "%s-S%02d", cls, i);
      Student s{sid, std::string("Student ") + sid, kMinYearLevel + (c - 1) % (kMaxYearLevel - kMinYearLevel + 1),
                generate_udid(opt.seed * 1000003ull + udid_index++)};
      store->add_student(s);
      setup.roster.push_back(s);
      ids.emplace_back(sid);
    }
    setup.layout = sim::ClassroomLayout::grid(ids, 5, 1.5, 2.0);

    for (int s = 0; s < opt.sessions; ++s) {
      char lesson_id[32];
      std::snprintf(lesson_id, sizeof lesson_id, "%s-L%03d", cls, s + 1);
      const auto teacher = sim::term_teachers(shape)[static_cast<std::size_t>(((c - 1) * 7 + s) % opt.teachers)];
      const auto start = add_seconds(shape.term_start, s * 86400.0 + ((c - 1) % 6) * 3600.0);
      Lesson lesson{lesson_id, teacher.teacher_id, ids, start, add_seconds(start, setup.session.duration_s)};
      store->add_lesson(lesson);
      auto session = setup;
      session.session.rng_seed = sim::session_seed(opt.seed + static_cast<std::uint64_t>(c) * 7919u, s);
      sim::SessionContext ctx{lesson_id, teacher.teacher_id, start};
      sim::run_session(session, sim::AgentKind::proximity, ctx, *store);
    }
  }
  out << "seeded " << store_path << ": " << opt.teachers << " teachers, " << opt.classes * opt.students_per_class
      << " students, " << opt.classes * opt.sessions << " lessons, " << store->record_count() << " records\n";
  return kExitOk;
}

}  // namespace

void request_shutdown() { g_shutdown = true; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"proxiclass: proximity-assisted behaviour records, quality scoring and classroom simulation"};
  app.require_subcommand(1);

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the student information HTTP service");
  serve_cmd->add_option("--config", serve.config, "Service config JSON (host, port, store, quality, policy, scanner)");
  serve_cmd->add_option("--store", serve.store, "Event log path (overrides config and PROXICLASS_STORE)");
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--port", serve.port, "Port; 0 picks a free one");
  serve_cmd->add_option("--port-file", serve.port_file, "Write the bound port to this file");

  SimulateOptions simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a seeded classroom term for one or both agents");
  sim_cmd->add_option("--config", simulate.config, "Simulation config JSON");
  sim_cmd->add_option("--agent", simulate.agent, "legacy | proximity | both")
      ->check(CLI::IsMember({"legacy", "proximity", "both"}));
  sim_cmd->add_option("--seed", simulate.seed, "Override the base seed");
  sim_cmd->add_option("--sessions", simulate.sessions, "Override the number of sessions");
  sim_cmd->add_option("--out", simulate.out_dir, "Output directory");
  sim_cmd->add_flag("--trace", simulate.trace, "Also write the proximity advertisement trace of the first lesson");
  sim_cmd->add_flag("--degrade", simulate.degrade, "Also write legacy-quality copies of each dataset");

  QualityOptions qopt;
  auto* quality_cmd = app.add_subcommand("quality", "Score a record dataset");
  quality_cmd->add_option("dataset", qopt.dataset, "Dataset (JSON lines)")->required();
  quality_cmd->add_option("--taxonomy", qopt.taxonomy, "Taxonomy JSON (default: standard)");
  quality_cmd->add_option("--roster", qopt.roster, "Roster JSON");
  quality_cmd->add_option("--config", qopt.config, "Quality config JSON");
  quality_cmd->add_option("-o,--out", qopt.output, "Write the report here instead of stdout");

  CompareOptions copt;
  auto* compare_cmd =
      app.add_subcommand("compare", "Compare a legacy dataset/report with a new one; exit 0 iff the new dominates");
  compare_cmd->add_option("legacy", copt.legacy, "Legacy dataset or QualityReport JSON")->required();
  compare_cmd->add_option("new", copt.fresh, "New dataset or QualityReport JSON")->required();
  compare_cmd->add_option("--taxonomy", copt.taxonomy, "Taxonomy JSON (default: standard)");
  compare_cmd->add_option("--roster", copt.roster, "Roster JSON");
  compare_cmd->add_option("--config", copt.config, "Quality config JSON");
  compare_cmd->add_option("-o,--out", copt.output, "Write the comparison here instead of stdout");

  SeedOptions seed;
  auto* seed_cmd = app.add_subcommand("seed-data", "Populate a store with a demo school");
  seed_cmd->add_option("--store", seed.store, "Event log path (default: PROXICLASS_STORE)");
  seed_cmd->add_option("--seed", seed.seed, "Seed");
  seed_cmd->add_option("--classes", seed.classes, "Number of classes");
  seed_cmd->add_option("--teachers", seed.teachers, "Number of teachers");
  seed_cmd->add_option("--sessions", seed.sessions, "Lessons per class");
  seed_cmd->add_option("--students-per-class", seed.students_per_class, "Class size");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*serve_cmd) return cmd_serve(serve, out, err);
    if (*sim_cmd) return cmd_simulate(simulate, out);
    if (*quality_cmd) return cmd_quality(qopt, out);
    if (*compare_cmd) return cmd_compare(copt, out);
    if (*seed_cmd) return cmd_seed_data(seed, out, err);
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const sim::ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace proxiclass::cli
