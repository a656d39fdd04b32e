#include "proxiclass/sis/proximity_board.hpp"

namespace proxiclass::sis {

ProximityBoard::ProximityBoard(proximity::ScannerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void ProximityBoard::publish_locked(const std::string& teacher_id, const std::optional<Udid>& udid) {
  auto& e = entries_[teacher_id];
  if (e.version != 0 && e.udid == udid) return;
  e.udid = udid;
  ++e.version;
  changed_.notify_all();
}

void ProximityBoard::publish(const std::string& teacher_id, std::optional<Udid> udid) {
  std::lock_guard lock(mutex_);
  publish_locked(teacher_id, udid);
}

ProximitySnapshot ProximityBoard::scan(const std::string& teacher_id,
                                       std::span<const proximity::Advertisement> advertisements,
                                       Timestamp now) {
  std::lock_guard lock(mutex_);
  auto& e = entries_[teacher_id];
  if (!e.scanner) e.scanner.emplace(cfg_);
  const auto current = e.scanner->scan(advertisements, now).current;
  publish_locked(teacher_id, current);
  return {teacher_id, e.udid, e.version};
}

ProximitySnapshot ProximityBoard::current(const std::string& teacher_id) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(teacher_id);
  if (it == entries_.end()) return {teacher_id, std::nullopt, 0};
  return {teacher_id, it->second.udid, it->second.version};
}

std::optional<ProximitySnapshot> ProximityBoard::wait_for_change(const std::string& teacher_id,
                                                                 std::uint64_t after_version,
                                                                 std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  const auto version = [&] {
    auto it = entries_.find(teacher_id);
    return it == entries_.end() ? std::uint64_t{0} : it->second.version;
  };
  if (!changed_.wait_for(lock, timeout, [&] { return version() > after_version; })) return std::nullopt;
  const auto& e = entries_.at(teacher_id);
  return ProximitySnapshot{teacher_id, e.udid, e.version};
}

}  // namespace proxiclass::sis
