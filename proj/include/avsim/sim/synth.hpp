#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avsim/mobility/gps.hpp"
#include "avsim/mobility/labeling.hpp"

namespace avsim::sim {

// Desk-scale stand-in for a field GPS study: named anchor points, per-profile
// daily schedules with jittered boundaries, Gaussian position noise, and a
// few interpolated samples while moving between anchors.
struct SynthAnchor {
  std::string name;
  std::string zone;
  double dx_m = 0.0;  // offset from the origin
  double dy_m = 0.0;
};

struct SynthScheduleEntry {
  std::string at;  // anchor name, or "Home"
  int until = 1440;
  int jitter_min = 0;
};

struct SynthProfile {
  std::string name;
  int participants = 1;
  SynthAnchor home;          // participant p is offset by p * home_spacing_m
  double home_spacing_m = 60.0;
  std::vector<SynthScheduleEntry> weekday;
  std::vector<SynthScheduleEntry> weekend;
};

struct SynthSpec {
  std::string start_date = "2021-10-04";  // a Monday
  int days = 21;
  int cadence_min = 5;
  double jitter_sigma_m = 2.0;
  int transit_minutes = 15;
  double origin_lat = 7.2906;
  double origin_lon = 80.6337;
  double anchor_radius_m = 30.0;
  std::vector<SynthAnchor> anchors;
  std::vector<SynthProfile> profiles;

  static SynthSpec from_json_file(const std::string& path);
};

struct SynthOutput {
  std::vector<mobility::GpsPoint> points;
  mobility::Gazetteer gazetteer;
  // participant id -> profile name (the planted ground truth)
  std::vector<std::pair<std::string, std::string>> truth;
};

SynthOutput synth_gps(const SynthSpec& spec, uint64_t seed);

// Built-in two-behavior bank-worker-style spec (day shift vs night shift),
// used by tests and available from the CLI.
SynthSpec two_shift_spec(int participants_per_group = 6);

}  // namespace avsim::sim
