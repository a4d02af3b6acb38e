#include "avsim/sim/synth.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "avsim/core/geo.hpp"
#include "avsim/core/rng.hpp"
#include "avsim/core/time.hpp"

namespace avsim::sim {

using core::kMinutesPerDay;

namespace {

struct InverseProjection {
  double lat0, lon0;
  std::pair<double, double> to_latlon(double x_m, double y_m) const {
    constexpr double rad = std::numbers::pi / 180.0;
    double lat = lat0 + y_m / core::kEarthRadiusM / rad;
    double lon = lon0 + x_m / (core::kEarthRadiusM * std::cos(lat0 * rad)) / rad;
    return {lat, lon};
  }
};

std::vector<SynthScheduleEntry> parse_entries(const nlohmann::json& j) {
  std::vector<SynthScheduleEntry> out;
  for (const auto& e : j) {
    SynthScheduleEntry s;
    s.at = e.at("at").get<std::string>();
    s.until = e.at("until").get<int>();
    s.jitter_min = e.value("jitter_min", 0);
    out.push_back(std::move(s));
  }
  return out;
}

SynthAnchor parse_anchor(const nlohmann::json& j) {
  SynthAnchor a;
  a.name = j.at("name").get<std::string>();
  a.zone = j.at("zone").get<std::string>();
  a.dx_m = j.value("dx_m", 0.0);
  a.dy_m = j.value("dy_m", 0.0);
  return a;
}

}  // namespace

SynthSpec SynthSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open synth profiles: " + path);
  nlohmann::json j;
  in >> j;
  SynthSpec s;
  s.start_date = j.value("start_date", s.start_date);
  s.days = j.value("days", s.days);
  s.cadence_min = j.value("cadence_min", s.cadence_min);
  s.jitter_sigma_m = j.value("jitter_sigma_m", s.jitter_sigma_m);
  s.transit_minutes = j.value("transit_minutes", s.transit_minutes);
  if (j.contains("origin")) {
    s.origin_lat = j["origin"].at("lat").get<double>();
    s.origin_lon = j["origin"].at("lon").get<double>();
  }
  s.anchor_radius_m = j.value("anchor_radius_m", s.anchor_radius_m);
  if (j.contains("anchors"))
    for (const auto& a : j["anchors"]) s.anchors.push_back(parse_anchor(a));
  for (const auto& p : j.at("profiles")) {
    SynthProfile prof;
    prof.name = p.at("name").get<std::string>();
    prof.participants = p.at("participants").get<int>();
    prof.home = parse_anchor(p.at("home"));
    prof.home_spacing_m = p.value("home_spacing_m", 60.0);
    prof.weekday = parse_entries(p.at("weekday"));
    prof.weekend = p.contains("weekend") ? parse_entries(p["weekend"]) : prof.weekday;
    s.profiles.push_back(std::move(prof));
  }
  return s;
}

SynthOutput synth_gps(const SynthSpec& spec, uint64_t seed) {
  if (spec.cadence_min < 1 || spec.days < 1 || spec.profiles.empty())
    throw std::invalid_argument("synth_gps: bad spec");
  SynthOutput out;
  out.gazetteer.nearest_cutoff_m = 2.0 * spec.anchor_radius_m;
  InverseProjection proj{spec.origin_lat, spec.origin_lon};

  int y, mo, d;
  if (std::sscanf(spec.start_date.c_str(), "%d-%d-%d", &y, &mo, &d) != 3)
    throw std::invalid_argument("synth_gps: bad start_date");
  int64_t start_epoch = core::days_from_civil(y, mo, d) * 86400;

  // Shared anchors appear once in the gazetteer and serve all participants.
  std::map<std::string, std::pair<double, double>> anchor_xy;
  for (const auto& a : spec.anchors) {
    anchor_xy[a.name] = {a.dx_m, a.dy_m};
    auto [lat, lon] = proj.to_latlon(a.dx_m, a.dy_m);
    out.gazetteer.entries.push_back(
        {"*", a.zone, a.name, lat, lon, spec.anchor_radius_m});
  }

  int pid_counter = 0;
  for (const auto& prof : spec.profiles) {
    for (int k = 0; k < prof.participants; ++k, ++pid_counter) {
      char pid_buf[64];
      std::snprintf(pid_buf, sizeof pid_buf, "%s_%02d", prof.name.c_str(), k);
      std::string pid = pid_buf;
      out.truth.emplace_back(pid, prof.name);

      double home_x = prof.home.dx_m + double(k) * prof.home_spacing_m;
      double home_y = prof.home.dy_m;
      {
        auto [lat, lon] = proj.to_latlon(home_x, home_y);
        out.gazetteer.entries.push_back(
            {pid, prof.home.zone, "Home", lat, lon, spec.anchor_radius_m});
      }
      auto xy_of = [&](const std::string& name) -> std::pair<double, double> {
        if (name == "Home") return {home_x, home_y};
        auto it = anchor_xy.find(name);
        if (it == anchor_xy.end())
          throw std::invalid_argument("synth_gps: unknown anchor '" + name + "'");
        return it->second;
      };

      for (int day = 0; day < spec.days; ++day) {
        const auto& entries =
            core::is_weekend_day(day) ? prof.weekend : prof.weekday;
        core::Rng rng = core::derive_stream(seed, "synth", uint64_t(pid_counter),
                                            uint64_t(day));
        // Jittered stay boundaries; each boundary ends with a transit window.
        std::vector<int> until(entries.size());
        int cursor = 0;
        for (size_t e = 0; e < entries.size(); ++e) {
          int u = entries[e].until;
          if (entries[e].jitter_min > 0 && e + 1 != entries.size())
            u += int(std::llround(rng.uniform(-double(entries[e].jitter_min),
                                              double(entries[e].jitter_min))));
          if (e + 1 == entries.size()) u = kMinutesPerDay;
          until[e] = std::clamp(u, cursor + 1, kMinutesPerDay);
          cursor = until[e];
        }

        auto position_at = [&](int minute) -> std::pair<double, double> {
          size_t e = 0;
          while (e < until.size() && minute >= until[e]) ++e;
          if (e >= until.size()) e = until.size() - 1;
          auto [x, y] = xy_of(entries[e].at);
          // A transit window precedes each boundary except the day's end.
          if (e + 1 < entries.size() && minute >= until[e] - spec.transit_minutes) {
            auto [nx, ny] = xy_of(entries[e + 1].at);
            double f = double(minute - (until[e] - spec.transit_minutes)) /
                       double(spec.transit_minutes);
            x += (nx - x) * f;
            y += (ny - y) * f;
          }
          return {x, y};
        };

        auto emit = [&](int minute) {
          auto [x, y] = position_at(minute);
          x += rng.normal(0.0, spec.jitter_sigma_m);
          y += rng.normal(0.0, spec.jitter_sigma_m);
          auto [lat, lon] = proj.to_latlon(x, y);
          mobility::GpsPoint p;
          p.participant = pid;
          p.t_epoch_s = start_epoch + int64_t(day) * 86400 + int64_t(minute) * 60;
          p.lat = lat;
          p.lon = lon;
          p.alt = 500.0;
          out.points.push_back(std::move(p));
        };
        for (int minute = 0; minute < kMinutesPerDay; minute += spec.cadence_min)
          emit(minute);
        if (day + 1 == spec.days) emit(kMinutesPerDay - 1);  // close the last day
      }
    }
  }
  return out;
}

SynthSpec two_shift_spec(int participants_per_group) {
  SynthSpec s;
  s.anchors.push_back({"Office", "Commercial", 800.0, 300.0});
  SynthProfile day_shift;
  day_shift.name = "day_shift";
  day_shift.participants = participants_per_group;
  day_shift.home = {"Home", "Residential", 0.0, 0.0};
  day_shift.weekday = {{"Home", 480, 20}, {"Office", 1020, 20}, {"Home", 1440, 0}};
  day_shift.weekend = day_shift.weekday;
  SynthProfile night_shift;
  night_shift.name = "night_shift";
  night_shift.participants = participants_per_group;
  night_shift.home = {"Home", "Residential", 0.0, 400.0};
  night_shift.weekday = {
      {"Office", 300, 20}, {"Home", 1260, 20}, {"Office", 1440, 0}};
  night_shift.weekend = night_shift.weekday;
  s.profiles = {day_shift, night_shift};
  return s;
}

}  // namespace avsim::sim
