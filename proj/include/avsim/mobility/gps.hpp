#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace avsim::mobility {

struct GpsPoint {
  std::string participant;
  int64_t t_epoch_s = 0;
  double lat = 0.0;
  double lon = 0.0;
  double alt = 0.0;  // carried through, unused by clustering
};

// CSV schema: participant_id,timestamp_iso8601,lat,lon,alt (header required).
std::vector<GpsPoint> read_gps_csv(std::istream& in);
void write_gps_csv(std::ostream& out, std::span<const GpsPoint> points);

// Zero-order-hold upsampling of one participant's trace to 1-minute cadence.
// Each sample is held for every minute in [t_i, t_{i+1}); the final sample
// contributes its own minute. Timestamps must be strictly increasing and at
// least one minute apart; violations reject the whole trace.
std::vector<GpsPoint> zoh_upsample(std::span<const GpsPoint> trace);

}  // namespace avsim::mobility
