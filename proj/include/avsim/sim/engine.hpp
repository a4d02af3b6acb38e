#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "avsim/disease/progression.hpp"
#include "avsim/disease/vector.hpp"
#include "avsim/env/transport.hpp"
#include "avsim/env/tree.hpp"
#include "avsim/sim/agent.hpp"
#include "avsim/sim/event_log.hpp"
#include "avsim/sim/scenario.hpp"
#include "avsim/trajectory/matrices.hpp"

namespace avsim::sim {

struct RunSummary {
  int population = 0;
  std::vector<int64_t> exposed_series;     // end-of-day count in Exposed
  std::vector<int64_t> infectious_series;  // end-of-day count in any I state
  std::vector<int64_t> recovered_series;
  int64_t peak_infectious = 0;
  int64_t total_airborne_exposures = 0;
  int64_t total_vector_exposures = 0;
  int64_t contacts_detected = 0;
  int64_t vector_control_events = 0;
  int64_t final_recovered = 0;
  int64_t final_dead = 0;
  std::vector<std::string> diagnostics;
};

// Discrete-time simulation engine: 1-minute ticks, daily timetable
// generation, 5-minute disease updates, deterministic keyed random streams.
// Per-tick phases run in fixed order (moves, vehicles, contacts,
// transmission, patches), so results do not depend on the thread count.
class Engine {
 public:
  explicit Engine(const Scenario& scenario);

  RunSummary run(const std::string& out_dir);

  const env::Environment& environment() const { return env_; }
  const std::vector<Agent>& agents() const { return agents_; }
  const disease::ProgressionTable& progression_table() const { return table_; }
  const traj::ProbabilityMatrices& matrices(int class_index, int subclass_index,
                                            bool weekend) const;

 private:
  enum class RoleKind { home, work, zone_class };
  struct RowRole {
    RoleKind kind = RoleKind::home;
    std::string zone_class;
  };
  struct BehaviorMatrices {
    traj::ProbabilityMatrices weekday;
    traj::ProbabilityMatrices weekend;
    std::vector<RowRole> weekday_roles;
    std::vector<RowRole> weekend_roles;
  };

  enum class Pos : uint8_t {
    Location,
    PrivateTransit,
    WalkToStop,
    Waiting,
    OnVehicle,
    Hospital,
    Quarantine,
    Gone,
  };
  enum class MoveKind : uint8_t {
    none,
    stay_end,
    taxi_depart,
    arrive_private,
    arrive_taxi,
    arrive_at_stop,
    arrive_final_walk,
  };
  struct PlannedStay {
    env::NodeId leaf = env::kNoNode;
    int start = 0;
    int end = 0;  // minute of day, exclusive
  };
  struct AgentRt {
    Pos pos = Pos::Location;
    MoveKind move_kind = MoveKind::none;
    env::NodeId at = env::kNoNode;
    int vehicle = -1;
    int64_t move_due = -1;
    env::NodeId dest_leaf = env::kNoNode;
    env::NodeId board_stop = env::kNoNode;
    env::NodeId alight_stop = env::kNoNode;
    std::vector<PlannedStay> plan;
    size_t plan_idx = 0;
    int leg_seq = 0;
  };

  // setup
  void load_behaviors();
  BehaviorMatrices load_subclass(int ci, int si);
  void compile_schedule(int ci, int si, const std::vector<ScheduleEntry>& entries,
                        int sample_days, bool weekend,
                        traj::ProbabilityMatrices& out,
                        std::vector<RowRole>& roles_out);
  void adopt_matrices(traj::ProbabilityMatrices&& m,
                      traj::ProbabilityMatrices& out,
                      std::vector<RowRole>& roles_out);
  RowRole parse_role(const std::string& label) const;
  void seed_initial_infections();

  // world bookkeeping
  void occupancy_add(int agent);
  void occupancy_remove(int agent);
  void state_counters(env::NodeId node, disease::State s, int delta);
  void remove_from_world(int agent);
  void schedule_due(int agent, int64_t minute_abs);

  // progression
  void enter_state(int agent, disease::State s, int64_t now);
  void apply_transition(int agent, int64_t now);
  void expose_from_contact(int agent, int64_t now, int transmitter,
                           const char* place_kind, int64_t place_id);
  void expose_from_patch(int agent, int64_t now, int patch);

  // movement
  void build_day_plan(int agent, int day);
  void handle_due(int agent, int64_t now);
  void start_leg_to(int agent, env::NodeId dest, int64_t now);
  void on_arrival(int agent, int64_t now);
  void align_with_plan(int agent, int64_t now);
  double walk_minutes(env::NodeId leaf, env::NodeId stop) const;

  // per-day phases
  void day_start(int day);
  void day_end(int day);
  void minute_tick(int64_t now);
  void vehicle_phase(int64_t now);
  void contact_phase(int64_t now);
  void patch_phase(int64_t now);
  void hospitalize_checks(int day);
  void pcr_and_trace(int day);
  void vaccination_checks(int day);
  void vector_control_check(int day);
  int64_t infectious_count() const;

  Scenario sc_;
  env::Environment env_;
  disease::ProgressionTable table_;
  env::TransportSystem transport_;
  std::vector<Agent> agents_;
  std::vector<std::vector<BehaviorMatrices>> behavior_;  // [class][subclass]
  std::map<std::pair<std::string, env::NodeId>, std::vector<env::NodeId>>
      leaves_by_class_city_;

  std::vector<AgentRt> rt_;
  std::vector<std::vector<int>> occupancy_;  // per node id (location leaves)
  std::vector<int> node_infectious_;
  std::vector<int> node_susceptible_;
  std::set<env::NodeId> active_nodes_;
  std::map<env::NodeId, std::vector<int>> waiting_;
  std::map<int, env::Vehicle> taxis_;
  int next_taxi_id_ = 1000000;

  std::vector<disease::PatchState> patch_state_;
  std::vector<double> patch_temp_;
  std::vector<int> patch_interventions_today_;
  std::vector<int64_t> zone_weekly_exposed_;  // indexed by zone_index
  std::vector<bool> vaccination_fired_;

  std::vector<std::vector<int>> due_;  // [minute of day] -> agent ids
  int day_ = 0;

  std::deque<std::map<int, std::vector<int>>> contact_window_;
  std::map<int, std::vector<int>> contacts_today_;

  struct TransitionRecord {
    int64_t minute;
    disease::State from;
    disease::State to;
  };
  std::vector<std::vector<TransitionRecord>> history_;

  EventLog* log_ = nullptr;
  RunSummary summary_;
};

}  // namespace avsim::sim
