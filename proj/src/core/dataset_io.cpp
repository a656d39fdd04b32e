#include "proxiclass/core/dataset_io.hpp"

#include <fstream>
#include <sstream>

namespace proxiclass {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  return out;
}

}  // namespace

std::vector<BehaviorRecord> read_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<BehaviorRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(json::parse(line).get<BehaviorRecord>());
    } catch (const std::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_dataset(const std::filesystem::path& path, const std::vector<BehaviorRecord>& records) {
  auto out = open_output(path);
  for (const auto& r : records) out << json(r).dump() << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

json read_json_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

BehaviorTaxonomy read_taxonomy(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  try {
    return taxonomy_from_json(j);
  } catch (const std::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> read_roster(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  if (!j.is_array()) throw InputError(path.string() + ": roster must be a JSON array");
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      ids.push_back(j[i].is_string() ? j[i].get<std::string>() : j[i].get<Student>().student_id);
    } catch (const std::exception& e) {
      throw InputError(path.string() + ": roster entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return ids;
}

}  // namespace proxiclass
