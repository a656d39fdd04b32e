#include "proxiclass/proximity/proximity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace proxiclass::proximity {

void PathLossModel::validate() const {
  if (!std::isfinite(tx_power_dbm_at_1m)) throw std::domain_error("path loss: tx power must be finite");
  if (!(exponent > 0.0) || !std::isfinite(exponent))
    throw std::domain_error("path loss: exponent must be > 0");
  if (!(noise_sigma_db >= 0.0) || !std::isfinite(noise_sigma_db))
    throw std::domain_error("path loss: noise_sigma_db must be >= 0");
}

double rssi_from_distance(const PathLossModel& model, double distance_m, double noise_draw) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m))
    throw std::domain_error("rssi_from_distance: distance must be positive, got " +
                            std::to_string(distance_m));
  return model.tx_power_dbm_at_1m - 10.0 * model.exponent * std::log10(distance_m) +
         noise_draw * model.noise_sigma_db;
}

void ScannerConfig::validate() const {
  if (!(ewma_alpha > 0.0 && ewma_alpha <= 1.0)) throw std::domain_error("scanner: ewma_alpha must be in (0,1]");
  if (!(stale_after_s > 0.0)) throw std::domain_error("scanner: stale_after_s must be > 0");
  if (!(hysteresis_db >= 0.0)) throw std::domain_error("scanner: hysteresis_db must be >= 0");
  if (confirm_scans < 1) throw std::domain_error("scanner: confirm_scans must be >= 1");
}

TrackMap ingest(TrackMap tracks, const Advertisement& adv, const ScannerConfig& cfg) {
  if (!std::isfinite(adv.rssi_dbm)) return tracks;
  auto it = tracks.find(adv.udid);
  if (it == tracks.end()) {
    tracks.emplace(adv.udid, SmoothedTrack{adv.udid, adv.rssi_dbm, adv.ts});
  } else {
    auto& t = it->second;
    t.ewma_rssi_dbm = cfg.ewma_alpha * adv.rssi_dbm + (1.0 - cfg.ewma_alpha) * t.ewma_rssi_dbm;
    t.last_seen = adv.ts;
  }
  return tracks;
}

TrackMap evict_stale(TrackMap tracks, Timestamp now, const ScannerConfig& cfg) {
  std::erase_if(tracks, [&](const auto& kv) {
    return seconds_between(kv.second.last_seen, now) > cfg.stale_after_s;
  });
  return tracks;
}

namespace {

// Strongest track other than `exclude`; strict > keeps the smallest udid on ties
// because the map iterates in udid order.
const SmoothedTrack* strongest(const TrackMap& tracks, const std::optional<Udid>& exclude) {
  const SmoothedTrack* best = nullptr;
  for (const auto& [udid, track] : tracks) {
    if (exclude && udid == *exclude) continue;
    if (best == nullptr || track.ewma_rssi_dbm > best->ewma_rssi_dbm) best = &track;
  }
  return best;
}

}  // namespace

ProximitySelection select_nearest(ProximitySelection sel, const TrackMap& tracks,
                                  const ScannerConfig& cfg) {
  if (tracks.empty()) return ProximitySelection{};

  const auto incumbent = sel.current ? tracks.find(*sel.current) : tracks.end();
  if (incumbent == tracks.end()) {
    return ProximitySelection{strongest(tracks, std::nullopt)->udid, std::nullopt, 0};
  }

  const SmoothedTrack* rival = strongest(tracks, sel.current);
  const bool qualifies =
      rival != nullptr &&
      rival->ewma_rssi_dbm - incumbent->second.ewma_rssi_dbm >= cfg.hysteresis_db;
  if (!qualifies) {
    sel.challenger.reset();
    sel.challenger_streak = 0;
    return sel;
  }
  if (sel.challenger == rival->udid) {
    ++sel.challenger_streak;
  } else {
    sel.challenger = rival->udid;
    sel.challenger_streak = 1;
  }
  if (sel.challenger_streak >= cfg.confirm_scans) {
    return ProximitySelection{rival->udid, std::nullopt, 0};
  }
  return sel;
}

ProximityScanner::ProximityScanner(ScannerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

const ProximitySelection& ProximityScanner::scan(std::span<const Advertisement> advertisements,
                                                 Timestamp now) {
  for (const auto& adv : advertisements) tracks_ = ingest(std::move(tracks_), adv, cfg_);
  tracks_ = evict_stale(std::move(tracks_), now, cfg_);
  selection_ = select_nearest(std::move(selection_), tracks_, cfg_);
  return selection_;
}

}  // namespace proxiclass::proximity
