#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "proxiclass/core/json.hpp"
#include "proxiclass/quality/quality.hpp"
#include "proxiclass/sim/classroom.hpp"

namespace proxiclass::sim {

// Carries every validation failure, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct ClassroomShape {
  int students = 20;
  int columns = 5;
  double spacing_x_m = 1.5;
  double spacing_y_m = 2.0;
  double margin_m = 1.0;
};

// File-level simulation config. Every section is optional; omitted fields keep
// their defaults.
struct SimConfig {
  int sessions = 20;
  ClassroomShape classroom;
  SimSetup setup = default_setup();
  TermShape term;
  quality::QualityConfig quality;
  DefectRates defects;
};

SimConfig default_sim_config();

// Throws ConfigError listing all problems found.
SimConfig sim_config_from_json(const json& j);
json sim_config_to_json(const SimConfig& c);

}  // namespace proxiclass::sim
