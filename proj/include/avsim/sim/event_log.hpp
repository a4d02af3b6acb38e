#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>

#include "avsim/disease/progression.hpp"

namespace avsim::sim {

// Column order of states.csv; Hosp is the care overlay for alive agents.
inline constexpr int kStateColumns = 9;
inline constexpr const char* kStatesHeader =
    "day,class,S,E,I_asym,I_mild,I_sev,I_crit,Hosp,R,D";

// Append-only run outputs: events.jsonl (typed events), states.csv (daily
// per-class counts), patches.csv (daily vector-patch rows), agents.jsonl
// (one summary record per agent). All writes happen on the engine thread,
// so identical runs produce byte-identical files.
class EventLog {
 public:
  EventLog(const std::string& out_dir, bool log_contacts, bool write_agents);

  bool contacts_enabled() const { return log_contacts_; }

  void contact(int64_t minute, const char* place_kind, int64_t place_id,
               int transmitter, int receiver, double distance_m);
  void exposure_from_contact(int64_t minute, int agent, int transmitter,
                             const char* place_kind, int64_t place_id);
  void exposure_from_patch(int64_t minute, int agent, int patch);
  void seed_marker(int64_t minute, int agent, disease::State state);
  void transition(int64_t minute, int agent, disease::State from,
                  disease::State to);
  void test(int day, int agent, bool positive);
  void quarantine(int day, int agent, int until_day, const char* reason);
  void hospitalization(int day, int agent, disease::State state);
  void vaccination(int day, const std::string& zones, const std::string& classes,
                   double boost, int64_t agents_affected);

  struct PatchChange {
    int patch = -1;
    double s_pre = 0, e_pre = 0, i_pre = 0;
    double s_post = 0, e_post = 0, i_post = 0;
  };
  void vector_control(int day, const std::string& zone, double reduction_pct,
                      std::span<const PatchChange> changes);

  void states_row(int day, const std::string& class_name,
                  const std::array<int64_t, kStateColumns>& counts);
  void patches_row(int day, int patch, const std::string& zone, double s_v,
                   double e_v, double i_v, double temperature_c, int interventions);
  void agent_line(const std::string& json_line);

  void flush();

 private:
  std::ofstream events_;
  std::ofstream states_;
  std::ofstream patches_;
  std::ofstream agents_;
  bool log_contacts_;
  bool write_agents_;
};

}  // namespace avsim::sim
