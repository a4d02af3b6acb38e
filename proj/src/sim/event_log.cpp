#include "avsim/sim/event_log.hpp"

#include <stdexcept>

#include "avsim/core/text.hpp"

namespace avsim::sim {

using core::fmt_exact;
using core::fmt_fixed;

EventLog::EventLog(const std::string& out_dir, bool log_contacts,
                   bool write_agents)
    : log_contacts_(log_contacts), write_agents_(write_agents) {
  events_.open(out_dir + "/events.jsonl");
  states_.open(out_dir + "/states.csv");
  patches_.open(out_dir + "/patches.csv");
  if (!events_ || !states_ || !patches_)
    throw std::runtime_error("cannot create output files in " + out_dir);
  if (write_agents_) {
    agents_.open(out_dir + "/agents.jsonl");
    if (!agents_) throw std::runtime_error("cannot create agents.jsonl in " + out_dir);
  }
  states_ << kStatesHeader << "\n";
  patches_ << "day,patch,zone,S_v,E_v,I_v,T_c,interventions\n";
}

void EventLog::contact(int64_t minute, const char* place_kind, int64_t place_id,
                       int transmitter, int receiver, double distance_m) {
  if (!log_contacts_) return;
  events_ << "{\"type\":\"contact\",\"minute\":" << minute << ",\"place_kind\":\""
          << place_kind << "\",\"place\":" << place_id
          << ",\"transmitter\":" << transmitter << ",\"receiver\":" << receiver
          << ",\"distance_m\":" << fmt_fixed(distance_m, 3) << "}\n";
}

void EventLog::exposure_from_contact(int64_t minute, int agent, int transmitter,
                                     const char* place_kind, int64_t place_id) {
  events_ << "{\"type\":\"exposure\",\"minute\":" << minute << ",\"agent\":" << agent
          << ",\"cause\":\"contact\",\"transmitter\":" << transmitter
          << ",\"place_kind\":\"" << place_kind << "\",\"place\":" << place_id
          << "}\n";
}

void EventLog::exposure_from_patch(int64_t minute, int agent, int patch) {
  events_ << "{\"type\":\"exposure\",\"minute\":" << minute << ",\"agent\":" << agent
          << ",\"cause\":\"patch\",\"patch\":" << patch << "}\n";
}

void EventLog::seed_marker(int64_t minute, int agent, disease::State state) {
  events_ << "{\"type\":\"exposure\",\"minute\":" << minute << ",\"agent\":" << agent
          << ",\"cause\":\"seed\",\"state\":\"" << disease::state_name(state)
          << "\"}\n";
}

void EventLog::transition(int64_t minute, int agent, disease::State from,
                          disease::State to) {
  events_ << "{\"type\":\"transition\",\"minute\":" << minute
          << ",\"agent\":" << agent << ",\"from\":\"" << disease::state_name(from)
          << "\",\"to\":\"" << disease::state_name(to) << "\"}\n";
}

void EventLog::test(int day, int agent, bool positive) {
  events_ << "{\"type\":\"test\",\"day\":" << day << ",\"agent\":" << agent
          << ",\"positive\":" << (positive ? "true" : "false") << "}\n";
}

void EventLog::quarantine(int day, int agent, int until_day, const char* reason) {
  events_ << "{\"type\":\"quarantine\",\"day\":" << day << ",\"agent\":" << agent
          << ",\"until_day\":" << until_day << ",\"reason\":\"" << reason
          << "\"}\n";
}

void EventLog::hospitalization(int day, int agent, disease::State state) {
  events_ << "{\"type\":\"hospitalization\",\"day\":" << day
          << ",\"agent\":" << agent << ",\"state\":\""
          << disease::state_name(state) << "\"}\n";
}

void EventLog::vaccination(int day, const std::string& zones,
                           const std::string& classes, double boost,
                           int64_t agents_affected) {
  events_ << "{\"type\":\"vaccination\",\"day\":" << day << ",\"zones\":\"" << zones
          << "\",\"classes\":\"" << classes << "\",\"boost\":" << fmt_exact(boost)
          << ",\"agents\":" << agents_affected << "}\n";
}

void EventLog::vector_control(int day, const std::string& zone,
                              double reduction_pct,
                              std::span<const PatchChange> changes) {
  events_ << "{\"type\":\"vector_control\",\"day\":" << day << ",\"zone\":\"" << zone
          << "\",\"reduction_pct\":" << fmt_exact(reduction_pct) << ",\"patches\":[";
  for (size_t i = 0; i < changes.size(); ++i) {
    const auto& c = changes[i];
    if (i) events_ << ',';
    events_ << "{\"patch\":" << c.patch << ",\"S_pre\":" << fmt_exact(c.s_pre)
            << ",\"E_pre\":" << fmt_exact(c.e_pre) << ",\"I_pre\":" << fmt_exact(c.i_pre)
            << ",\"S_post\":" << fmt_exact(c.s_post) << ",\"E_post\":" << fmt_exact(c.e_post)
            << ",\"I_post\":" << fmt_exact(c.i_post) << "}";
  }
  events_ << "]}\n";
}

void EventLog::states_row(int day, const std::string& class_name,
                          const std::array<int64_t, kStateColumns>& counts) {
  states_ << day << ',' << class_name;
  for (int64_t c : counts) states_ << ',' << c;
  states_ << '\n';
}

void EventLog::patches_row(int day, int patch, const std::string& zone,
                           double s_v, double e_v, double i_v,
                           double temperature_c, int interventions) {
  patches_ << day << ',' << patch << ',' << zone << ',' << fmt_fixed(s_v, 4) << ','
           << fmt_fixed(e_v, 4) << ',' << fmt_fixed(i_v, 4) << ','
           << fmt_fixed(temperature_c, 2) << ',' << interventions << '\n';
}

void EventLog::agent_line(const std::string& json_line) {
  if (write_agents_) agents_ << json_line << '\n';
}

void EventLog::flush() {
  events_.flush();
  states_.flush();
  patches_.flush();
  if (write_agents_) agents_.flush();
}

}  // namespace avsim::sim
