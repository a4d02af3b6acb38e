#include "avsim/mobility/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "avsim/core/geo.hpp"
#include "avsim/core/text.hpp"
#include "avsim/core/time.hpp"
#include "avsim/mobility/dbscan.hpp"

namespace avsim::mobility {

using core::kMinutesPerDay;

Gazetteer Gazetteer::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gazetteer: " + path);
  nlohmann::json j;
  in >> j;
  Gazetteer g;
  g.nearest_cutoff_m = j.value("nearest_cutoff_m", 250.0);
  for (const auto& e : j.at("entries")) {
    GazetteerEntry ge;
    ge.participant = e.value("participant", "*");
    ge.zone = e.at("zone").get<std::string>();
    ge.label = e.at("label").get<std::string>();
    ge.lat = e.at("lat").get<double>();
    ge.lon = e.at("lon").get<double>();
    ge.radius_m = e.value("radius_m", 50.0);
    g.entries.push_back(std::move(ge));
  }
  return g;
}

namespace {

// Zones and labels are ordered lexicographically so the codebook does not
// depend on gazetteer entry order.
std::map<std::pair<std::string, std::string>, uint16_t> build_codebook(
    const Gazetteer& gaz) {
  std::map<std::string, std::set<std::string>> zones;
  for (const auto& e : gaz.entries) zones[e.zone].insert(e.label);
  uint32_t max_locs = 0;
  for (const auto& [zone, labels] : zones)
    max_locs = std::max<uint32_t>(max_locs, uint32_t(labels.size()));
  CodePage page = CodePage::fit(uint32_t(zones.size()), max_locs);
  std::map<std::pair<std::string, std::string>, uint16_t> book;
  uint32_t zi = 0;
  for (const auto& [zone, labels] : zones) {
    uint32_t li = 0;
    for (const auto& label : labels)
      book[{zone, label}] = uint16_t(page.encode(zi, li)), ++li;
    ++zi;
  }
  return book;
}

struct ResolvedLabel {
  std::string zone;
  std::string label;
  bool known = false;
};

ResolvedLabel resolve(const Gazetteer& gaz, const core::LocalProjection& proj,
                      const std::string& participant, double lat, double lon) {
  const GazetteerEntry* containing = nullptr;
  const GazetteerEntry* nearest = nullptr;
  double best_contained = 0.0, best_any = 0.0;
  for (const auto& e : gaz.entries) {
    if (e.participant != "*" && e.participant != participant) continue;
    double d = proj.distance_m(lat, lon, e.lat, e.lon);
    if (d <= e.radius_m && (!containing || d < best_contained)) {
      containing = &e;
      best_contained = d;
    }
    if (!nearest || d < best_any) {
      nearest = &e;
      best_any = d;
    }
  }
  if (containing) return {containing->zone, containing->label, true};
  if (nearest && best_any <= gaz.nearest_cutoff_m)
    return {nearest->zone, nearest->label, true};
  return {"", kUnknownLabel, false};
}

}  // namespace

MobilityResult process_traces(std::span<const GpsPoint> points,
                              const Gazetteer& gazetteer,
                              const MobilityParams& params) {
  MobilityResult result;
  result.codebook = build_codebook(gazetteer);

  // Dataset centroid anchors the planar projection for all participants.
  core::LocalProjection proj;
  if (!points.empty()) {
    double slat = 0, slon = 0;
    for (const auto& p : points) {
      slat += p.lat;
      slon += p.lon;
    }
    proj.lat0_deg = slat / double(points.size());
    proj.lon0_deg = slon / double(points.size());
  }

  std::map<std::string, std::vector<GpsPoint>> traces;
  for (const auto& p : points) traces[p.participant].push_back(p);

  int next_region_id = 0;
  for (auto& [pid, raw] : traces) {
    std::vector<GpsPoint> up;
    try {
      up = zoh_upsample(raw);
    } catch (const std::exception& e) {
      result.diagnostics.push_back(std::string("rejected trace: ") + e.what());
      continue;
    }

    std::vector<Point2> xy(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
      auto q = proj.to_xy(raw[i].lat, raw[i].lon);
      xy[i] = {q.x_m, q.y_m};
    }
    std::vector<int> cluster = dbscan(xy, params.eps_m, params.min_pts);

    int n_clusters = 0;
    for (int c : cluster) n_clusters = std::max(n_clusters, c + 1);
    std::vector<StayRegion> regions(n_clusters);
    for (size_t i = 0; i < raw.size(); ++i) {
      if (cluster[i] < 0) continue;
      auto& r = regions[cluster[i]];
      r.member_points.push_back(int(i));
      r.centroid_lat += raw[i].lat;
      r.centroid_lon += raw[i].lon;
    }
    // Region code per cluster; sentinel when unlabeled.
    std::vector<uint16_t> region_code(n_clusters, kUnknown);
    std::vector<std::string> region_label(n_clusters, kUnknownLabel);
    for (int c = 0; c < n_clusters; ++c) {
      auto& r = regions[c];
      r.region_id = next_region_id++;
      r.participant = pid;
      r.centroid_lat /= double(r.member_points.size());
      r.centroid_lon /= double(r.member_points.size());
      ResolvedLabel rl =
          resolve(gazetteer, proj, pid, r.centroid_lat, r.centroid_lon);
      r.zone = rl.zone;
      r.label = rl.label;
      if (rl.known) {
        region_code[c] = result.codebook.at({rl.zone, rl.label});
        region_label[c] = rl.label;
      } else {
        result.diagnostics.push_back("unlabeled stay region for '" + pid +
                                     "' near " + core::fmt_fixed(r.centroid_lat, 5) +
                                     "," + core::fmt_fixed(r.centroid_lon, 5));
      }
      result.regions.push_back(r);
    }

    // Walk the upsampled minutes, tracking the raw sample each minute holds.
    // Only complete civil days survive.
    std::map<int64_t, std::vector<std::pair<int, int>>> by_day;  // day -> (minute, cluster)
    size_t src = 0;
    for (const auto& m : up) {
      int64_t minute = m.t_epoch_s / 60;
      while (src + 1 < raw.size() && raw[src + 1].t_epoch_s / 60 <= minute) ++src;
      int64_t day = minute >= 0 ? minute / kMinutesPerDay
                                : (minute - kMinutesPerDay + 1) / kMinutesPerDay;
      by_day[day].emplace_back(int(minute - day * kMinutesPerDay), cluster[src]);
    }
    int day_index = 0;
    for (const auto& [day, mins] : by_day) {
      if (int(mins.size()) != kMinutesPerDay) continue;  // partial day, dropped
      for (const auto& [minute, c] : mins) {
        TimeLocationRecord rec;
        rec.participant = pid;
        rec.day_index = day_index;
        rec.minute = minute;
        if (c >= 0) {
          rec.code = region_code[c];
          rec.label = region_label[c];
        } else {
          rec.code = kInTransit;
          rec.label = kInTransitLabel;
        }
        result.records.push_back(std::move(rec));
      }
      ++day_index;
    }
  }
  return result;
}

void write_time_location_csv(std::ostream& out,
                             std::span<const TimeLocationRecord> records) {
  out << "participant_id,day,minute,location_code,label\n";
  for (const auto& r : records)
    out << r.participant << ',' << r.day_index << ',' << r.minute << ','
        << r.code << ',' << r.label << '\n';
}

std::vector<TimeLocationRecord> read_time_location_csv(std::istream& in) {
  std::vector<TimeLocationRecord> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    auto t = core::trim(line);
    if (t.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto cols = core::split(t, ',');
    if (cols.size() != 5)
      throw std::invalid_argument("time-location csv: expected 5 columns");
    TimeLocationRecord r;
    r.participant = std::string(core::trim(cols[0]));
    r.day_index = int(core::parse_long(core::trim(cols[1])));
    r.minute = int(core::parse_long(core::trim(cols[2])));
    r.code = uint16_t(core::parse_long(core::trim(cols[3])));
    r.label = std::string(core::trim(cols[4]));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace avsim::mobility
