#pragma once

// Advertisement trace files: one JSON object per line, {ts, udid, rssi_dbm}.

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "proxiclass/core/json.hpp"
#include "proxiclass/proximity/proximity.hpp"

namespace proxiclass::proximity {

void to_json(json& j, const Advertisement& a);
void from_json(const json& j, Advertisement& a);

void write_trace(std::ostream& out, std::span<const Advertisement> ads);

// Throws std::runtime_error naming the 1-based line of the first bad entry.
std::vector<Advertisement> read_trace(std::istream& in);

// Groups advertisements by timestamp into scan cycles and replays them through
// a fresh scanner, returning the selection after every cycle.
std::vector<ProximitySelection> replay_trace(std::span<const Advertisement> ads,
                                             const ScannerConfig& cfg);

}  // namespace proxiclass::proximity
