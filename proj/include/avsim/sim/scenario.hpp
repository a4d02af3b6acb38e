#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "avsim/disease/vector.hpp"

namespace avsim::sim {

// A stay template entry: at `label` until minute `until`, boundary jittered
// by +-jitter_min when sampling synthetic schedule days.
struct ScheduleEntry {
  std::string at;
  int until = 1440;
  int jitter_min = 0;
};

struct SubclassSpec {
  std::string name;
  double fraction = 1.0;
  // Either file references produced by `fit`, or inline schedule templates
  // the engine expands into matrices at load time.
  std::string weekday_matrices;
  std::string weekend_matrices;
  std::vector<ScheduleEntry> weekday_schedule;
  std::vector<ScheduleEntry> weekend_schedule;
  int schedule_sample_days = 60;
};

struct ClassSpec {
  std::string name;
  double fraction = 0.0;
  int age_min = 0;
  int age_max = 80;
  std::string home_zone_class = "residential";
  std::string work_zone_class;  // empty: works from home
  std::vector<SubclassSpec> subclasses;
};

struct ImmunityDefaults {
  double k = 0.3;
  double alpha_vacc = 1.0;
  double gamma_vacc = 0.0;
  double alpha_hyg = 0.0;
  double gamma_hyg = 0.0;
};

struct PcrPolicy {
  bool enabled = false;
  int cadence_days = 1;
  double symptomatic_test_prob = 1.0;
  double screening_fraction = 0.0;
  double sensitivity = 1.0;
  double specificity = 1.0;
  int trace_window_days = 5;
  int quarantine_days = 14;
};

struct VaccinationEvent {
  int day = -1;                       // fixed day, or
  double trigger_infected_pct = -1;   // fire when infected share crosses this
  std::vector<std::string> zones;     // empty: everywhere
  std::vector<std::string> classes;   // empty: everyone
  double boost = 0.0;
};

struct VectorControlPolicy {
  bool enabled = false;
  int period_days = 7;
  double exposed_threshold = 2.0;
  double reduction_pct = 75.0;
};

struct AirborneSeeding {
  std::string agent_class;
  int count = 0;
  std::string state = "InfectiousMild";
};

struct VectorSeeding {
  std::string residential_zone;  // empty: first residential zone
  int exposed_homes = 6;
  int agents_per_home = 5;
  double infected_vectors_max = 20.0;
  double initial_fill = 0.9;  // S_v starts at this fraction of K_v
};

struct Footprint {
  double w = 20.0;
  double h = 20.0;
};

enum class DiseaseKind { airborne, vectorborne };

struct Scenario {
  std::string name = "scenario";
  uint64_t seed = 1;
  int duration_days = 50;
  DiseaseKind kind = DiseaseKind::airborne;

  std::string environment_path;
  std::string progression_path;

  int population_size = 0;
  int household_size = 4;
  std::vector<ClassSpec> classes;
  ImmunityDefaults immunity;

  // Matrix row label -> "home" | "work" | "zone:<class>" | "transit".
  std::map<std::string, std::string> location_roles;

  PcrPolicy pcr;
  std::vector<VaccinationEvent> vaccinations;
  VectorControlPolicy vector_control;
  AirborneSeeding airborne_seed;
  VectorSeeding vector_seed;
  disease::VectorParams vector_params;

  double contact_radius_m = 1.0;
  std::map<std::string, Footprint> footprints;  // zone class / "default" / "vehicle"
  int disease_update_min = 5;
  double public_preference = 0.5;
  bool taxi_fallback = true;
  bool log_contacts = false;
  bool write_agents = true;
  double patch_temperature_override = std::nan("");
  std::set<int> holidays;  // day indices treated as weekend
  int threads = 1;

  static Scenario from_json_file(const std::string& path);
  static Scenario from_json_text(const std::string& text,
                                 const std::string& base_dir);

  Footprint footprint_for(const std::string& zone_class) const;
  Footprint vehicle_footprint() const;
  bool is_weekend(int day) const;
  void validate() const;
};

}  // namespace avsim::sim
