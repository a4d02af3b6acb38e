#include "avsim/mobility/gps.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "avsim/core/text.hpp"
#include "avsim/core/time.hpp"

namespace avsim::mobility {

using core::kMinutesPerDay;

std::vector<GpsPoint> read_gps_csv(std::istream& in) {
  std::vector<GpsPoint> out;
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
      throw std::invalid_argument("gps csv: expected 5 columns, got " +
                                  std::to_string(cols.size()));
    GpsPoint p;
    p.participant = std::string(core::trim(cols[0]));
    p.t_epoch_s = core::parse_iso8601(core::trim(cols[1]));
    p.lat = core::parse_double(core::trim(cols[2]));
    p.lon = core::parse_double(core::trim(cols[3]));
    p.alt = core::parse_double(core::trim(cols[4]));
    if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0)
      throw std::invalid_argument("gps csv: coordinates out of range for " +
                                  p.participant);
    out.push_back(std::move(p));
  }
  return out;
}

void write_gps_csv(std::ostream& out, std::span<const GpsPoint> points) {
  out << "participant_id,timestamp_iso8601,lat,lon,alt\n";
  for (const auto& p : points) {
    out << p.participant << ',' << core::format_iso8601(p.t_epoch_s) << ','
        << core::fmt_fixed(p.lat, 7) << ',' << core::fmt_fixed(p.lon, 7) << ','
        << core::fmt_fixed(p.alt, 1) << '\n';
  }
}

std::vector<GpsPoint> zoh_upsample(std::span<const GpsPoint> trace) {
  std::vector<GpsPoint> out;
  if (trace.empty()) return out;
  for (size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].t_epoch_s <= trace[i - 1].t_epoch_s)
      throw std::invalid_argument("zoh_upsample: non-monotonic timestamps in trace of '" +
                                  trace[0].participant + "'");
    if (trace[i].t_epoch_s / 60 == trace[i - 1].t_epoch_s / 60)
      throw std::invalid_argument("zoh_upsample: samples closer than one minute in trace of '" +
                                  trace[0].participant + "'");
  }
  int64_t first_minute = trace.front().t_epoch_s / 60;
  int64_t last_minute = trace.back().t_epoch_s / 60;
  out.reserve(size_t(last_minute - first_minute + 1));
  size_t src = 0;
  for (int64_t m = first_minute; m <= last_minute; ++m) {
    while (src + 1 < trace.size() && trace[src + 1].t_epoch_s / 60 <= m) ++src;
    GpsPoint p = trace[src];
    p.t_epoch_s = m * 60;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace avsim::mobility
