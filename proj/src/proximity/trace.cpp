#include "proxiclass/proximity/trace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace proxiclass::proximity {

void to_json(json& j, const Advertisement& a) {
  j = json{{"ts", format_rfc3339(a.ts)}, {"udid", a.udid.str()}, {"rssi_dbm", a.rssi_dbm}};
}

void from_json(const json& j, Advertisement& a) {
  a.ts = timestamp_from_json(j.at("ts"));
  a.udid = Udid::parse(j.at("udid").get<std::string>());
  a.rssi_dbm = j.at("rssi_dbm").get<double>();
  if (!std::isfinite(a.rssi_dbm)) throw std::invalid_argument("rssi_dbm must be finite");
}

void write_trace(std::ostream& out, std::span<const Advertisement> ads) {
  for (const auto& a : ads) out << json(a).dump() << '\n';
}

std::vector<Advertisement> read_trace(std::istream& in) {
  std::vector<Advertisement> ads;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ads.push_back(json::parse(line).get<Advertisement>());
    } catch (const std::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ads;
}

std::vector<ProximitySelection> replay_trace(std::span<const Advertisement> ads,
                                             const ScannerConfig& cfg) {
  std::vector<ProximitySelection> out;
  ProximityScanner scanner(cfg);
  std::size_t i = 0;
  while (i < ads.size()) {
    std::size_t j = i;
    while (j < ads.size() && ads[j].ts == ads[i].ts) ++j;
    out.push_back(scanner.scan(ads.subspan(i, j - i), ads[i].ts));
    i = j;
  }
  return out;
}

}  // namespace proxiclass::proximity
