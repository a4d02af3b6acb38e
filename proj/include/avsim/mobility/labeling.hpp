#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "avsim/mobility/gps.hpp"
#include "avsim/mobility/location_code.hpp"

namespace avsim::mobility {

// Named reference points used to resolve stay-region centroids to semantic
// labels. participant "*" entries apply to everyone; otherwise the entry is
// private to one participant (their "Home" anchor, typically).
struct GazetteerEntry {
  std::string participant = "*";
  std::string zone;       // zone name, e.g. "Residential"
  std::string label;      // location name, e.g. "Home"
  double lat = 0.0;
  double lon = 0.0;
  double radius_m = 50.0;
};

struct Gazetteer {
  std::vector<GazetteerEntry> entries;
  double nearest_cutoff_m = 250.0;

  static Gazetteer from_json_file(const std::string& path);
};

struct StayRegion {
  int region_id = 0;
  std::string participant;
  double centroid_lat = 0.0;
  double centroid_lon = 0.0;
  std::vector<int> member_points;  // indices into the participant's raw trace
  std::string zone;
  std::string label;  // kUnknownLabel when unresolvable
};

struct TimeLocationRecord {
  std::string participant;
  int day_index = 0;  // 0-based over the participant's complete days
  int minute = 0;     // 0..1439
  uint16_t code = kInTransit;
  std::string label = kInTransitLabel;
};

struct MobilityResult {
  std::vector<TimeLocationRecord> records;
  std::vector<StayRegion> regions;
  // (zone, label) -> numeric code, built from the gazetteer vocabulary.
  std::map<std::pair<std::string, std::string>, uint16_t> codebook;
  std::vector<std::string> diagnostics;
};

struct MobilityParams {
  double eps_m = 5.0;
  int min_pts = 10;
};

// Full pipeline: per participant, upsample, cluster the raw samples into stay
// regions, resolve labels, and emit one record per minute of every complete
// day. Minutes outside any stay region are IN_TRANSIT.
MobilityResult process_traces(std::span<const GpsPoint> points,
                              const Gazetteer& gazetteer,
                              const MobilityParams& params = {});

// CSV schema: participant_id,day,minute,location_code,label (header line).
void write_time_location_csv(std::ostream& out,
                             std::span<const TimeLocationRecord> records);
std::vector<TimeLocationRecord> read_time_location_csv(std::istream& in);

}  // namespace avsim::mobility
