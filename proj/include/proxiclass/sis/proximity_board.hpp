#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>

#include "proxiclass/proximity/proximity.hpp"

namespace proxiclass::sis {

struct ProximitySnapshot {
  std::string teacher_id;
  std::optional<Udid> udid;
  // Bumped whenever the published udid changes; 0 means never published.
  std::uint64_t version = 0;
};

// Latest nearest-student selection per teacher, published by scanners or the
// simulator and read by the HTTP layer. Selection runs server-side: scan()
// feeds raw advertisements through a per-teacher ProximityScanner.
class ProximityBoard {
 public:
  explicit ProximityBoard(proximity::ScannerConfig cfg = {});

  void publish(const std::string& teacher_id, std::optional<Udid> udid);
  ProximitySnapshot scan(const std::string& teacher_id,
                         std::span<const proximity::Advertisement> advertisements, Timestamp now);
  ProximitySnapshot current(const std::string& teacher_id) const;

  // Waits until the teacher's version exceeds `after_version`; nullopt on timeout.
  std::optional<ProximitySnapshot> wait_for_change(const std::string& teacher_id,
                                                   std::uint64_t after_version,
                                                   std::chrono::milliseconds timeout) const;

 private:
  struct Entry {
    std::optional<Udid> udid;
    std::uint64_t version = 0;
    std::optional<proximity::ProximityScanner> scanner;
  };
  void publish_locked(const std::string& teacher_id, const std::optional<Udid>& udid);

  proximity::ScannerConfig cfg_;
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::map<std::string, Entry> entries_;
};

}  // namespace proxiclass::sis
