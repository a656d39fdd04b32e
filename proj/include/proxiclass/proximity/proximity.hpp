#pragma once

#include <map>
#include <optional>
#include <span>

#include "proxiclass/core/time.hpp"
#include "proxiclass/core/udid.hpp"

namespace proxiclass::proximity {

// Log-distance path loss with Gaussian shadowing.
struct PathLossModel {
  double tx_power_dbm_at_1m = -59.0;
  double exponent = 2.0;
  double noise_sigma_db = 2.0;

  void validate() const;  // throws std::domain_error
};

// tx_power - 10*n*log10(d) + noise_draw*sigma. `noise_draw` is a standard
// normal sample (0 for the noiseless mean). Throws std::domain_error for d <= 0.
double rssi_from_distance(const PathLossModel& model, double distance_m, double noise_draw = 0.0);

struct Advertisement {
  Udid udid;
  double rssi_dbm = 0.0;
  Timestamp ts;

  friend bool operator==(const Advertisement&, const Advertisement&) = default;
};

struct SmoothedTrack {
  Udid udid;
  double ewma_rssi_dbm = 0.0;
  Timestamp last_seen;

  friend bool operator==(const SmoothedTrack&, const SmoothedTrack&) = default;
};

struct ScannerConfig {
  double ewma_alpha = 0.3;
  double stale_after_s = 5.0;
  double hysteresis_db = 6.0;
  int confirm_scans = 3;

  void validate() const;  // throws std::domain_error
};

// Ordered by udid so that iteration (and therefore tie-breaking) is stable.
using TrackMap = std::map<Udid, SmoothedTrack>;

struct ProximitySelection {
  std::optional<Udid> current;
  std::optional<Udid> challenger;
  int challenger_streak = 0;

  friend bool operator==(const ProximitySelection&, const ProximitySelection&) = default;
};

TrackMap ingest(TrackMap tracks, const Advertisement& adv, const ScannerConfig& cfg);

TrackMap evict_stale(TrackMap tracks, Timestamp now, const ScannerConfig& cfg);

// One scan cycle of the hysteresis state machine:
//  - no tracks: selection cleared;
//  - no incumbent (or it vanished): strongest track, ties to the smallest udid;
//  - otherwise the strongest other track must beat the incumbent by
//    hysteresis_db for confirm_scans consecutive cycles to take over.
ProximitySelection select_nearest(ProximitySelection sel, const TrackMap& tracks,
                                  const ScannerConfig& cfg);

// Owns the track map and selection of a single scanning context.
class ProximityScanner {
 public:
  explicit ProximityScanner(ScannerConfig cfg = {});

  // Ingests every advertisement, evicts stale tracks as of `now`, then runs
  // one selection cycle.
  const ProximitySelection& scan(std::span<const Advertisement> advertisements, Timestamp now);

  const ProximitySelection& selection() const noexcept { return selection_; }
  const TrackMap& tracks() const noexcept { return tracks_; }
  const ScannerConfig& config() const noexcept { return cfg_; }

 private:
  ScannerConfig cfg_;
  TrackMap tracks_;
  ProximitySelection selection_;
};

}  // namespace proxiclass::proximity
