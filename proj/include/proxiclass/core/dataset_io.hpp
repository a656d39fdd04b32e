#pragma once

// File formats shared by the CLI and the simulator: record datasets are JSON
// lines of BehaviorRecord; taxonomies and rosters are single JSON documents.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "proxiclass/core/json.hpp"

namespace proxiclass {

// Unreadable or malformed input. The message names the file (and line).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<BehaviorRecord> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const std::vector<BehaviorRecord>& records);

json read_json_file(const std::filesystem::path& path);
// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const json& j);

BehaviorTaxonomy read_taxonomy(const std::filesystem::path& path);

// Accepts an array of student ids or of Student objects.
std::vector<std::string> read_roster(const std::filesystem::path& path);

}  // namespace proxiclass
