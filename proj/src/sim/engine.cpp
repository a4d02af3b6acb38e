#include "avsim/sim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "avsim/core/parallel.hpp"
#include "avsim/core/rng.hpp"
#include "avsim/core/text.hpp"
#include "avsim/core/time.hpp"
#include "avsim/disease/airborne.hpp"
#include "avsim/sim/population.hpp"

namespace avsim::sim {

using core::kMinutesPerDay;
using disease::State;

// ---------------------------------------------------------------------------
// setup

Engine::Engine(const Scenario& scenario)
    : sc_(scenario),
      env_(env::Environment::from_json_file(scenario.environment_path, scenario.seed)),
      table_(disease::ProgressionTable::from_json_file(scenario.progression_path)) {
  transport_.build(env_);
  load_behaviors();

  for (env::NodeId leaf : env_.locations()) {
    const auto& zone = env_.node(env_.node(leaf).parent);
    leaves_by_class_city_[{zone.zone_class, env_.city_of(leaf)}].push_back(leaf);
  }

  agents_ = generate_population(sc_, env_, table_);
  history_.resize(agents_.size());
  summary_.population = int(agents_.size());

  // Intervention targets must resolve at load, not when they fire.
  auto class_index_of = [&](const std::string& name) {
    for (size_t i = 0; i < sc_.classes.size(); ++i)
      if (sc_.classes[i].name == name) return int(i);
    throw std::runtime_error("scenario: unknown class '" + name + "'");
  };
  for (const auto& ev : sc_.vaccinations) {
    for (const auto& zn : ev.zones) env_.zone_by_name(zn);
    for (const auto& cn : ev.classes) class_index_of(cn);
  }
  if (sc_.kind == DiseaseKind::airborne && sc_.airborne_seed.count > 0)
    class_index_of(sc_.airborne_seed.agent_class);
  if (sc_.kind == DiseaseKind::vectorborne &&
      !sc_.vector_seed.residential_zone.empty())
    env_.zone_by_name(sc_.vector_seed.residential_zone);
}

Engine::RowRole Engine::parse_role(const std::string& label) const {
  auto it = sc_.location_roles.find(label);
  if (it == sc_.location_roles.end())
    throw std::runtime_error("scenario: no role mapping for matrix label '" +
                             label + "'");
  const std::string& role = it->second;
  if (role == "home") return {RoleKind::home, {}};
  if (role == "work") return {RoleKind::work, {}};
  if (role.rfind("zone:", 0) == 0) return {RoleKind::zone_class, role.substr(5)};
  throw std::runtime_error("scenario: bad role '" + role + "' for label '" +
                           label + "'");
}

// Timetables drive movement, so transit and unknown rows are dropped and the
// visit columns renormalized; travel re-emerges from the transport model.
void Engine::adopt_matrices(traj::ProbabilityMatrices&& m,
                            traj::ProbabilityMatrices& out,
                            std::vector<RowRole>& roles_out) {
  std::vector<int> keep;
  for (int l = 0; l < m.rows(); ++l) {
    const std::string& label = m.labels[size_t(l)];
    if (label == mobility::kInTransitLabel || label == mobility::kUnknownLabel)
      continue;
    auto it = sc_.location_roles.find(label);
    if (it != sc_.location_roles.end() && it->second == "transit") continue;
    keep.push_back(l);
  }
  if (keep.empty())
    throw std::runtime_error("scenario: matrices contain only transit rows");

  traj::ProbabilityMatrices s;
  for (int l : keep) {
    s.codes.push_back(m.codes[size_t(l)]);
    s.labels.push_back(m.labels[size_t(l)]);
  }
  const int n = int(keep.size());
  s.visit.resize(n, kMinutesPerDay);
  s.occupancy.resize(n, kMinutesPerDay);
  for (int r = 0; r < n; ++r) {
    s.visit.row(r) = m.visit.row(keep[size_t(r)]);
    s.occupancy.row(r) = m.occupancy.row(keep[size_t(r)]);
  }
  for (int t = 0; t < kMinutesPerDay; ++t) {
    double sum = s.visit.col(t).sum();
    if (sum > 1e-12) {
      s.visit.col(t) /= sum;
    } else if (t > 0) {
      s.visit.col(t) = s.visit.col(t - 1);  // column was pure transit
    } else {
      s.visit.col(t).setConstant(1.0 / n);
    }
  }
  s.finalize();

  roles_out.clear();
  for (int l = 0; l < s.rows(); ++l) roles_out.push_back(parse_role(s.labels[size_t(l)]));
  out = std::move(s);
}

void Engine::compile_schedule(int ci, int si,
                              const std::vector<ScheduleEntry>& entries,
                              int sample_days, bool weekend,
                              traj::ProbabilityMatrices& out,
                              std::vector<RowRole>& roles_out) {
  std::vector<std::string> labels;
  for (const auto& e : entries) labels.push_back(e.at);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::map<std::string, uint16_t> code_of;
  std::vector<std::pair<uint16_t, std::string>> vocab;
  for (size_t i = 0; i < labels.size(); ++i) {
    code_of[labels[i]] = uint16_t(i);
    vocab.emplace_back(uint16_t(i), labels[i]);
  }

  std::vector<std::vector<uint16_t>> days;
  for (int d = 0; d < sample_days; ++d) {
    core::Rng rng = core::derive_stream(
        sc_.seed, weekend ? "sched_we" : "sched_wd",
        uint64_t(ci) << 16 | uint64_t(si), uint64_t(d));
    std::vector<uint16_t> day(kMinutesPerDay, 0);
    int cursor = 0;
    for (size_t e = 0; e < entries.size(); ++e) {
      int until = entries[e].until;
      if (entries[e].jitter_min > 0 && e + 1 != entries.size()) {
        until += int(std::llround(
            rng.uniform(-double(entries[e].jitter_min), double(entries[e].jitter_min))));
      }
      if (e + 1 == entries.size()) until = kMinutesPerDay;
      until = std::clamp(until, cursor + 1, kMinutesPerDay);
      std::fill(day.begin() + cursor, day.begin() + until, code_of.at(entries[e].at));
      cursor = until;
      if (cursor >= kMinutesPerDay) break;
    }
    if (cursor < kMinutesPerDay)
      std::fill(day.begin() + cursor, day.end(), code_of.at(entries.back().at));
    days.push_back(std::move(day));
  }
  adopt_matrices(traj::estimate_matrices_from_days(days, vocab), out, roles_out);
}

Engine::BehaviorMatrices Engine::load_subclass(int ci, int si) {
  const SubclassSpec& sub = sc_.classes[size_t(ci)].subclasses[size_t(si)];
  BehaviorMatrices bm;
  if (!sub.weekday_matrices.empty()) {
    adopt_matrices(traj::read_matrices_file(sub.weekday_matrices), bm.weekday,
                   bm.weekday_roles);
    adopt_matrices(traj::read_matrices_file(sub.weekend_matrices), bm.weekend,
                   bm.weekend_roles);
  } else {
    compile_schedule(ci, si, sub.weekday_schedule, sub.schedule_sample_days,
                     false, bm.weekday, bm.weekday_roles);
    compile_schedule(ci, si, sub.weekend_schedule, sub.schedule_sample_days,
                     true, bm.weekend, bm.weekend_roles);
  }
  return bm;
}

void Engine::load_behaviors() {
  behavior_.resize(sc_.classes.size());
  for (size_t ci = 0; ci < sc_.classes.size(); ++ci)
    for (size_t si = 0; si < sc_.classes[ci].subclasses.size(); ++si)
      behavior_[ci].push_back(load_subclass(int(ci), int(si)));
}

const traj::ProbabilityMatrices& Engine::matrices(int class_index,
                                                  int subclass_index,
                                                  bool weekend) const {
  const BehaviorMatrices& bm =
      behavior_.at(size_t(class_index)).at(size_t(subclass_index));
  return weekend ? bm.weekend : bm.weekday;
}

void Engine::seed_initial_infections() {
  if (sc_.kind == DiseaseKind::airborne) {
    const auto& seed = sc_.airborne_seed;
    if (seed.count <= 0) return;
    int ci = -1;
    for (size_t i = 0; i < sc_.classes.size(); ++i)
      if (sc_.classes[i].name == seed.agent_class) ci = int(i);
    if (ci < 0)
      throw std::runtime_error("scenario: seeding class '" + seed.agent_class +
                               "' not in population");
    std::vector<int> candidates;
    for (const auto& a : agents_)
      if (a.class_index == ci) candidates.push_back(a.id);
    if (int(candidates.size()) < seed.count)
      throw std::runtime_error("scenario: not enough agents to seed");
    core::Rng rng = core::derive_stream(sc_.seed, "seed_air");
    for (size_t i = candidates.size(); i > 1; --i)
      std::swap(candidates[i - 1], candidates[size_t(rng.below(i))]);
    State st = disease::state_from_name(seed.state);
    for (int k = 0; k < seed.count; ++k) {
      enter_state(candidates[size_t(k)], st, 0);
      log_->seed_marker(0, candidates[size_t(k)], st);
    }
    return;
  }

  // Vector-borne: exposed households in one residential zone plus infected
  // vectors in the patch neighborhoods around each seeded home.
  const auto& seed = sc_.vector_seed;
  env::NodeId zone = env::kNoNode;
  if (!seed.residential_zone.empty()) {
    zone = env_.zone_by_name(seed.residential_zone);
  } else {
    for (env::NodeId z : env_.zones())
      if (env_.node(z).zone_class == "residential") {
        zone = z;
        break;
      }
  }
  if (zone == env::kNoNode)
    throw std::runtime_error("scenario: no residential zone to seed");

  std::map<env::NodeId, std::vector<int>> residents;
  for (const auto& a : agents_)
    if (env_.node(a.home).parent == zone) residents[a.home].push_back(a.id);
  std::vector<env::NodeId> homes;
  for (const auto& [leaf, ids] : residents) homes.push_back(leaf);
  core::Rng rng = core::derive_stream(sc_.seed, "seed_vec");
  for (size_t i = homes.size(); i > 1; --i)
    std::swap(homes[i - 1], homes[size_t(rng.below(i))]);

  int seeded_homes = 0;
  for (env::NodeId home : homes) {
    if (seeded_homes == seed.exposed_homes) break;
    const auto& ids = residents[home];
    int take = std::min<int>(seed.agents_per_home, int(ids.size()));
    for (int k = 0; k < take; ++k) {
      enter_state(ids[size_t(k)], State::Exposed, 0);
      log_->seed_marker(0, ids[size_t(k)], State::Exposed);
    }
    for (int p : env_.patch_neighborhood(home)) {
      double u = core::keyed_uniform(sc_.seed, "seed_iv", uint64_t(p));
      double iv = std::floor(u * (seed.infected_vectors_max + 1.0));
      iv = std::min(iv, seed.infected_vectors_max);
      auto& ps = patch_state_[size_t(p)];
      ps.i_v = iv;
      ps.s_v = std::max(0.0, ps.s_v - iv);  // keep N_v at the initial fill
    }
    ++seeded_homes;
  }
  if (seeded_homes == 0)
    summary_.diagnostics.push_back("vector seeding found no occupied homes");
}

// ---------------------------------------------------------------------------
// world bookkeeping

void Engine::state_counters(env::NodeId node, State s, int delta) {
  if (disease::is_infectious(s)) {
    node_infectious_[size_t(node)] += delta;
    if (node_infectious_[size_t(node)] > 0)
      active_nodes_.insert(node);
    else
      active_nodes_.erase(node);
  } else if (s == State::Susceptible) {
    node_susceptible_[size_t(node)] += delta;
  }
}

void Engine::occupancy_add(int agent) {
  AgentRt& rt = rt_[size_t(agent)];
  occupancy_[size_t(rt.at)].push_back(agent);
  state_counters(rt.at, agents_[size_t(agent)].state, +1);
}

void Engine::occupancy_remove(int agent) {
  AgentRt& rt = rt_[size_t(agent)];
  auto& occ = occupancy_[size_t(rt.at)];
  occ.erase(std::find(occ.begin(), occ.end(), agent));
  state_counters(rt.at, agents_[size_t(agent)].state, -1);
}

void Engine::remove_from_world(int agent) {
  AgentRt& rt = rt_[size_t(agent)];
  switch (rt.pos) {
    case Pos::Location:
      occupancy_remove(agent);
      break;
    case Pos::Waiting: {
      auto& w = waiting_[rt.board_stop];
      w.erase(std::find(w.begin(), w.end(), agent));
      break;
    }
    case Pos::OnVehicle: {
      if (taxis_.count(rt.vehicle)) {
        taxis_.erase(rt.vehicle);
      } else {
        auto& occ = transport_.vehicles()[size_t(rt.vehicle)].occupants;
        occ.erase(std::find(occ.begin(), occ.end(), agent));
      }
      break;
    }
    default:
      break;
  }
  rt.vehicle = -1;
  rt.move_kind = MoveKind::none;
  rt.move_due = -1;
}

void Engine::schedule_due(int agent, int64_t minute_abs) {
  int64_t day0 = int64_t(day_) * kMinutesPerDay;
  if (minute_abs >= day0 && minute_abs < day0 + kMinutesPerDay)
    due_[size_t(minute_abs - day0)].push_back(agent);
  // Later minutes are picked up by day_start scans.
}

// ---------------------------------------------------------------------------
// progression

void Engine::enter_state(int agent, State s, int64_t now) {
  Agent& a = agents_[size_t(agent)];
  AgentRt& rt = rt_[size_t(agent)];
  State old = a.state;
  if (rt.pos == Pos::Location) state_counters(rt.at, old, -1);
  a.state = s;
  a.state_entered_min = now;
  if (rt.pos == Pos::Location) state_counters(rt.at, s, +1);

  if (!disease::is_absorbing(s) && table_.transitions.count(s)) {
    core::Rng rng = core::derive_stream(sc_.seed, "prog", uint64_t(agent),
                                        uint64_t(a.transition_ordinal++));
    disease::SampledTransition tr = disease::sample_transition(s, a.age, table_, rng);
    a.pending_next = tr.next;
    a.state_exit_min = now + tr.duration_minutes;
    schedule_due(agent, a.state_exit_min);
  } else {
    a.state_exit_min = -1;
  }
}

void Engine::apply_transition(int agent, int64_t now) {
  Agent& a = agents_[size_t(agent)];
  AgentRt& rt = rt_[size_t(agent)];
  State from = a.state;
  State to = a.pending_next;
  log_->transition(now, agent, from, to);
  history_[size_t(agent)].push_back({now, from, to});

  if (to == State::Dead) {
    remove_from_world(agent);
    rt.pos = Pos::Gone;
    rt.at = env::kNoNode;
    enter_state(agent, to, now);
    a.hospitalized = false;
    return;
  }
  enter_state(agent, to, now);
  if (to == State::Recovered && a.hospitalized) {
    // Discharge: back to the home location and its patch.
    a.hospitalized = false;
    rt.pos = Pos::Location;
    rt.at = a.home;
    rt.dest_leaf = env::kNoNode;
    rt.move_kind = MoveKind::none;
    rt.move_due = -1;
    int mod = int(now - int64_t(day_) * kMinutesPerDay);
    rt.plan = {{a.home, mod, kMinutesPerDay}};
    rt.plan_idx = 0;
    occupancy_add(agent);
  }
}

void Engine::expose_from_contact(int agent, int64_t now, int transmitter,
                                 const char* place_kind, int64_t place_id) {
  enter_state(agent, State::Exposed, now);
  log_->exposure_from_contact(now, agent, transmitter, place_kind, place_id);
  ++summary_.total_airborne_exposures;
}

void Engine::expose_from_patch(int agent, int64_t now, int patch) {
  enter_state(agent, State::Exposed, now);
  log_->exposure_from_patch(now, agent, patch);
  ++summary_.total_vector_exposures;
  int zi = env_.node(env_.patches()[size_t(patch)].zone).zone_index;
  ++zone_weekly_exposed_[size_t(zi)];
}

// ---------------------------------------------------------------------------
// movement

double Engine::walk_minutes(env::NodeId leaf, env::NodeId stop) const {
  const auto& tc = env_.transport();
  if (env_.node(stop).kind == env::NodeKind::zone) return tc.location_zone_min;
  return tc.location_zone_min + tc.zone_city_min;  // city stop
}

void Engine::build_day_plan(int agent, int day) {
  Agent& a = agents_[size_t(agent)];
  AgentRt& rt = rt_[size_t(agent)];
  const BehaviorMatrices& bm =
      behavior_[size_t(a.class_index)][size_t(a.subclass_index)];
  bool weekend = sc_.is_weekend(day);
  const traj::ProbabilityMatrices& m = weekend ? bm.weekend : bm.weekday;
  const std::vector<RowRole>& roles = weekend ? bm.weekend_roles : bm.weekday_roles;

  core::Rng traj_rng =
      core::derive_stream(sc_.seed, "traj", uint64_t(agent), uint64_t(day));
  traj::DailyTrajectory tr = traj::generate_trajectory(m, traj_rng);

  rt.plan.clear();
  rt.plan_idx = 0;
  rt.leg_seq = 0;
  for (size_t k = 0; k < tr.stays.size(); ++k) {
    const auto& stay = tr.stays[k];
    const RowRole& role = roles[size_t(stay.location_row)];
    env::NodeId leaf = env::kNoNode;
    switch (role.kind) {
      case RoleKind::home:
        leaf = a.home;
        break;
      case RoleKind::work:
        leaf = a.work;
        break;
      case RoleKind::zone_class: {
        auto it = leaves_by_class_city_.find({role.zone_class, env_.city_of(a.home)});
        const std::vector<env::NodeId>* leaves =
            it != leaves_by_class_city_.end() ? &it->second : nullptr;
        if (!leaves || leaves->empty()) {
          const auto& all = env_.locations_of_class(role.zone_class);
          if (all.empty())
            throw std::runtime_error("scenario: no locations of zone class '" +
                                     role.zone_class + "'");
          leaves = &all;
        }
        core::Rng rng = core::derive_stream(sc_.seed, "where", uint64_t(agent),
                                            uint64_t(day), uint64_t(k));
        leaf = (*leaves)[size_t(rng.below(leaves->size()))];
        break;
      }
    }
    if (!rt.plan.empty() && rt.plan.back().leaf == leaf)
      rt.plan.back().end = stay.start_minute + stay.duration;
    else
      rt.plan.push_back({leaf, stay.start_minute, stay.start_minute + stay.duration});
  }
}

void Engine::start_leg_to(int agent, env::NodeId dest, int64_t now) {
  AgentRt& rt = rt_[size_t(agent)];
  core::Rng rng = core::derive_stream(sc_.seed, "mode", uint64_t(agent),
                                      uint64_t(day_), uint64_t(rt.leg_seq++));
  std::array<env::NodeId, 2> pair{rt.at, dest};
  auto legs = env::plan_legs(env_, transport_, pair, sc_.public_preference, rng);
  const env::LegPlan& leg = legs.front();
  rt.dest_leaf = dest;

  if (leg.public_mode) {
    occupancy_remove(agent);
    rt.pos = Pos::WalkToStop;
    rt.board_stop = leg.board_stop;
    rt.alight_stop = leg.alight_stop;
    rt.move_kind = MoveKind::arrive_at_stop;
    rt.move_due = now + int64_t(std::ceil(walk_minutes(rt.at, leg.board_stop)));
    schedule_due(agent, rt.move_due);
    return;
  }
  if (leg.fallback_private && sc_.taxi_fallback) {
    // Wait at the current location for the taxi to arrive.
    rt.move_kind = MoveKind::taxi_depart;
    rt.move_due = now + env_.transport().taxi_dispatch_min;
    schedule_due(agent, rt.move_due);
    return;
  }
  occupancy_remove(agent);
  rt.pos = Pos::PrivateTransit;
  rt.move_kind = MoveKind::arrive_private;
  rt.move_due =
      now + std::max<int64_t>(1, int64_t(std::ceil(
                                     env_.private_travel_minutes(rt.at, dest))));
  schedule_due(agent, rt.move_due);
}

void Engine::on_arrival(int agent, int64_t now) {
  AgentRt& rt = rt_[size_t(agent)];
  rt.pos = Pos::Location;
  rt.at = rt.dest_leaf;
  rt.dest_leaf = env::kNoNode;
  rt.move_kind = MoveKind::none;
  rt.move_due = -1;
  occupancy_add(agent);
  align_with_plan(agent, now);
}

void Engine::align_with_plan(int agent, int64_t now) {
  AgentRt& rt = rt_[size_t(agent)];
  int mod = int(now - int64_t(day_) * kMinutesPerDay);
  while (rt.plan_idx < rt.plan.size() && rt.plan[rt.plan_idx].end <= mod)
    ++rt.plan_idx;
  if (rt.plan_idx >= rt.plan.size()) return;  // idle until tomorrow's plan
  const PlannedStay& stay = rt.plan[rt.plan_idx];
  if (stay.leaf != rt.at) {
    start_leg_to(agent, stay.leaf, now);
    return;
  }
  if (stay.end < kMinutesPerDay) {
    rt.move_kind = MoveKind::stay_end;
    rt.move_due = int64_t(day_) * kMinutesPerDay + stay.end;
    schedule_due(agent, rt.move_due);
  } else {
    rt.move_kind = MoveKind::none;
    rt.move_due = -1;
  }
}

void Engine::handle_due(int agent, int64_t now) {
  Agent& a = agents_[size_t(agent)];
  AgentRt& rt = rt_[size_t(agent)];

  if (a.state_exit_min == now && a.alive()) apply_transition(agent, now);

  if (rt.move_due != now || rt.move_kind == MoveKind::none) return;
  if (rt.pos == Pos::Hospital || rt.pos == Pos::Quarantine || rt.pos == Pos::Gone)
    return;

  switch (rt.move_kind) {
    case MoveKind::stay_end: {
      ++rt.plan_idx;
      if (rt.plan_idx >= rt.plan.size()) {
        rt.move_kind = MoveKind::none;
        rt.move_due = -1;
        return;
      }
      start_leg_to(agent, rt.plan[rt.plan_idx].leaf, now);
      return;
    }
    case MoveKind::taxi_depart: {
      occupancy_remove(agent);
      env::Vehicle taxi;
      taxi.id = next_taxi_id_++;
      taxi.kind = env::VehicleKind::taxi;
      taxi.capacity = env_.transport().taxi_capacity;
      taxi.occupants = {agent};
      taxi.depart_minute = now;
      taxi.arrive_minute =
          now + std::max<int64_t>(
                    1, int64_t(std::ceil(
                           env_.private_travel_minutes(rt.at, rt.dest_leaf))));
      rt.pos = Pos::OnVehicle;
      rt.vehicle = taxi.id;
      rt.move_kind = MoveKind::arrive_taxi;
      rt.move_due = taxi.arrive_minute;
      taxis_.emplace(taxi.id, std::move(taxi));
      schedule_due(agent, rt.move_due);
      return;
    }
    case MoveKind::arrive_taxi:
      taxis_.erase(rt.vehicle);
      rt.vehicle = -1;
      on_arrival(agent, now);
      return;
    case MoveKind::arrive_private:
      on_arrival(agent, now);
      return;
    case MoveKind::arrive_at_stop: {
      rt.pos = Pos::Waiting;
      rt.move_kind = MoveKind::none;
      rt.move_due = -1;
      auto& w = waiting_[rt.board_stop];
      w.insert(std::upper_bound(w.begin(), w.end(), agent), agent);
      return;
    }
    case MoveKind::arrive_final_walk:
      on_arrival(agent, now);
      return;
    case MoveKind::none:
      return;
  }
}

void Engine::vehicle_phase(int64_t now) {
  for (auto& v : transport_.vehicles()) {
    auto pos = transport_.position(v, now);
    if (!pos.dwelling) continue;

    // Alight first so freed seats can be reused this minute.
    std::vector<int> riders = v.occupants;
    std::sort(riders.begin(), riders.end());
    for (int agent : riders) {
      AgentRt& rt = rt_[size_t(agent)];
      if (rt.alight_stop != pos.node) continue;
      v.occupants.erase(std::find(v.occupants.begin(), v.occupants.end(), agent));
      rt.vehicle = -1;
      rt.pos = Pos::WalkToStop;
      rt.move_kind = MoveKind::arrive_final_walk;
      rt.move_due =
          now + int64_t(std::ceil(walk_minutes(rt.dest_leaf, pos.node)));
      schedule_due(agent, rt.move_due);
    }

    auto wit = waiting_.find(pos.node);
    if (wit == waiting_.end()) continue;
    auto& waiters = wit->second;
    size_t i = 0;
    while (i < waiters.size()) {
      if (int(v.occupants.size()) >= v.capacity) break;  // full: wait for next
      int agent = waiters[i];
      AgentRt& rt = rt_[size_t(agent)];
      v.occupants.push_back(agent);
      rt.pos = Pos::OnVehicle;
      rt.vehicle = v.id;
      waiters.erase(waiters.begin() + long(i));
    }
  }
}

// ---------------------------------------------------------------------------
// disease phases

void Engine::contact_phase(int64_t now) {
  struct Place {
    bool is_vehicle = false;
    env::NodeId node = env::kNoNode;
    int vehicle_id = -1;
    const std::vector<int>* occupants = nullptr;
    Footprint fp;
  };
  std::vector<Place> places;

  for (env::NodeId node : active_nodes_) {
    if (node_susceptible_[size_t(node)] <= 0) continue;
    Place p;
    p.node = node;
    p.occupants = &occupancy_[size_t(node)];
    p.fp = sc_.footprint_for(env_.node(env_.node(node).parent).zone_class);
    places.push_back(p);
  }
  auto add_vehicle_place = [&](const env::Vehicle& v) {
    if (v.occupants.size() < 2) return;
    bool inf = false, sus = false;
    for (int agent : v.occupants) {
      const Agent& a = agents_[size_t(agent)];
      inf |= disease::is_infectious(a.state);
      sus |= a.state == State::Susceptible;
    }
    if (!inf || !sus) return;
    Place p;
    p.is_vehicle = true;
    p.vehicle_id = v.id;
    p.occupants = &v.occupants;
    p.fp = sc_.vehicle_footprint();
    places.push_back(p);
  };
  for (const auto& v : transport_.vehicles()) add_vehicle_place(v);
  for (const auto& [id, taxi] : taxis_) add_vehicle_place(taxi);

  std::vector<std::vector<disease::ContactPair>> results(places.size());
  core::parallel_for(places.size(), sc_.threads, [&](size_t i) {
    const Place& p = places[i];
    std::vector<int> ids = *p.occupants;
    std::sort(ids.begin(), ids.end());
    std::vector<disease::ContactCandidate> cands;
    cands.reserve(ids.size());
    for (int agent : ids) {
      const Agent& a = agents_[size_t(agent)];
      cands.push_back({agent, disease::is_infectious(a.state),
                       a.state == State::Susceptible});
    }
    core::Rng rng =
        p.is_vehicle
            ? core::derive_stream(sc_.seed, "vpos", uint64_t(p.vehicle_id),
                                  uint64_t(now))
            : core::derive_stream(sc_.seed, "pos", uint64_t(p.node), uint64_t(now));
    results[i] =
        disease::detect_contacts(cands, p.fp.w, p.fp.h, sc_.contact_radius_m, rng);
  });

  for (size_t i = 0; i < places.size(); ++i) {
    const Place& p = places[i];
    const char* kind = p.is_vehicle ? "vehicle" : "location";
    int64_t place_id = p.is_vehicle ? p.vehicle_id : p.node;
    for (const auto& pair : results[i]) {
      ++summary_.contacts_detected;
      log_->contact(now, kind, place_id, pair.transmitter, pair.receiver,
                    pair.distance_m);
      if (sc_.pcr.enabled) {
        // A pair in contact for a while repeats every minute; the back-of-list
        // check drops most duplicates before the day-end dedupe.
        auto& tx_list = contacts_today_[pair.transmitter];
        if (tx_list.empty() || tx_list.back() != pair.receiver)
          tx_list.push_back(pair.receiver);
        auto& rx_list = contacts_today_[pair.receiver];
        if (rx_list.empty() || rx_list.back() != pair.transmitter)
          rx_list.push_back(pair.transmitter);
      }
      Agent& rx = agents_[size_t(pair.receiver)];
      if (rx.state != State::Susceptible) continue;  // exposed earlier this minute
      double u = core::keyed_uniform(sc_.seed, "trial", uint64_t(now),
                                     uint64_t(pair.transmitter),
                                     uint64_t(pair.receiver));
      if (u < disease::infection_prob(rx.immunity))
        expose_from_contact(pair.receiver, now, pair.transmitter, kind, place_id);
    }
  }
}

void Engine::patch_phase(int64_t now) {
  const auto& patches = env_.patches();
  const size_t n = patches.size();
  static thread_local std::vector<double> n_h, i_h;
  static thread_local std::vector<std::vector<int>> sus;
  n_h.assign(n, 0.0);
  i_h.assign(n, 0.0);
  sus.assign(n, {});

  for (const auto& a : agents_) {
    const AgentRt& rt = rt_[size_t(a.id)];
    if (rt.pos != Pos::Location) continue;  // transit, hospital, quarantine: no patch
    int p = env_.patch_of_location(rt.at);
    n_h[size_t(p)] += 1.0;
    if (disease::is_infectious(a.state)) i_h[size_t(p)] += 1.0;
    if (a.state == State::Susceptible) sus[size_t(p)].push_back(a.id);
  }

  const double dt_days = double(sc_.disease_update_min) / double(kMinutesPerDay);
  const int64_t step = now / sc_.disease_update_min;
  bool clamped_any = false;
  for (size_t p = 0; p < n; ++p) {
    disease::PatchState& ps = patch_state_[p];
    double pre_nv = ps.n_v();
    if (pre_nv <= 0.0 && n_h[p] <= 0.0) continue;

    if (pre_nv > 0.0 && ps.i_v > 0.0 && !sus[p].empty()) {
      disease::Bites bites = disease::total_bites(pre_nv, n_h[p], sc_.vector_params);
      double lambda = disease::human_force(bites.per_human, ps.i_v, pre_nv,
                                           sc_.vector_params.beta_hv);
      double pk = disease::infection_probability(lambda, dt_days);
      if (pk > 0.0) {
        for (int agent : sus[p]) {
          double u = core::keyed_uniform(sc_.seed, "bite", uint64_t(step),
                                         uint64_t(agent));
          if (u < pk) expose_from_patch(agent, now, int(p));
        }
      }
    }
    clamped_any |= disease::step_patch(ps, patches[p].capacity, sc_.vector_params,
                                       i_h[p], n_h[p], dt_days);
  }
  if (clamped_any)
    summary_.diagnostics.push_back("patch step clamped negative counts at minute " +
                                   std::to_string(now));
}

// ---------------------------------------------------------------------------
// daily phases

void Engine::hospitalize_checks(int day) {
  for (auto& a : agents_) {
    if (!a.alive() || a.hospitalized || !disease::is_symptomatic(a.state)) continue;
    if (rt_[size_t(a.id)].pos == Pos::Quarantine) continue;  // already isolated
    double p = table_.hospitalization.prob_for(a.state);
    if (p <= 0.0) continue;
    if (core::keyed_uniform(sc_.seed, "hosp", uint64_t(a.id), uint64_t(day)) < p) {
      remove_from_world(a.id);
      rt_[size_t(a.id)].pos = Pos::Hospital;
      a.hospitalized = true;
      log_->hospitalization(day, a.id, a.state);
    }
  }
}

void Engine::pcr_and_trace(int day) {
  const PcrPolicy& pol = sc_.pcr;
  std::vector<int> positives;
  for (const auto& a : agents_) {
    if (!a.alive() || a.hospitalized || a.in_quarantine(day)) continue;
    bool tested = false;
    if (disease::is_symptomatic(a.state))
      tested = core::keyed_uniform(sc_.seed, "pcr", uint64_t(a.id), uint64_t(day)) <
               pol.symptomatic_test_prob;
    if (!tested && pol.screening_fraction > 0.0)
      tested = core::keyed_uniform(sc_.seed, "screen", uint64_t(a.id),
                                   uint64_t(day)) < pol.screening_fraction;
    if (!tested) continue;
    bool infected = a.state == State::Exposed || disease::is_infectious(a.state);
    double u = core::keyed_uniform(sc_.seed, "assay", uint64_t(a.id), uint64_t(day));
    bool positive = infected ? u < pol.sensitivity : u < 1.0 - pol.specificity;
    log_->test(day, a.id, positive);
    if (positive) positives.push_back(a.id);
  }

  auto quarantine_agent = [&](int agent, const char* reason) {
    Agent& a = agents_[size_t(agent)];
    if (!a.alive() || a.hospitalized) return;
    int until = day + pol.quarantine_days;
    if (a.quarantine_until_day >= until) return;
    if (!a.in_quarantine(day)) {
      remove_from_world(agent);
      rt_[size_t(agent)].pos = Pos::Quarantine;
    }
    a.quarantine_until_day = until;
    log_->quarantine(day, agent, until, reason);
  };

  for (int agent : positives) {
    quarantine_agent(agent, "positive");
    // Contact-traced partners over the lookback window.
    for (const auto& day_map : contact_window_) {
      auto it = day_map.find(agent);
      if (it == day_map.end()) continue;
      for (int partner : it->second) quarantine_agent(partner, "traced");
    }
  }
}

void Engine::vaccination_checks(int day) {
  if (sc_.vaccinations.empty()) return;
  double infected_pct =
      100.0 * double(infectious_count()) / double(agents_.size());
  for (size_t e = 0; e < sc_.vaccinations.size(); ++e) {
    if (vaccination_fired_[e]) continue;
    const VaccinationEvent& ev = sc_.vaccinations[e];
    bool fire = (ev.day >= 0 && day == ev.day) ||
                (ev.trigger_infected_pct >= 0 &&
                 infected_pct > ev.trigger_infected_pct);
    if (!fire) continue;
    vaccination_fired_[e] = true;

    std::set<env::NodeId> zones;
    for (const auto& zn : ev.zones) zones.insert(env_.zone_by_name(zn));
    std::set<int> classes;
    for (const auto& cn : ev.classes) {
      int ci = -1;
      for (size_t i = 0; i < sc_.classes.size(); ++i)
        if (sc_.classes[i].name == cn) ci = int(i);
      if (ci < 0)
        throw std::runtime_error("scenario: vaccination targets unknown class '" +
                                 cn + "'");
      classes.insert(ci);
    }
    int64_t affected = 0;
    for (auto& a : agents_) {
      if (!a.alive()) continue;
      if (!zones.empty() && !zones.count(env_.node(a.home).parent)) continue;
      if (!classes.empty() && !classes.count(a.class_index)) continue;
      a.immunity.gamma_vacc = std::min(1.0, a.immunity.gamma_vacc + ev.boost);
      ++affected;
    }
    std::string zone_names, class_names;
    for (const auto& z : ev.zones) zone_names += (zone_names.empty() ? "" : ";") + z;
    for (const auto& c : ev.classes)
      class_names += (class_names.empty() ? "" : ";") + c;
    log_->vaccination(day, zone_names.empty() ? "*" : zone_names,
                      class_names.empty() ? "*" : class_names, ev.boost, affected);
  }
}

void Engine::vector_control_check(int day) {
  const VectorControlPolicy& pol = sc_.vector_control;
  for (env::NodeId zid : env_.zones()) {
    int zi = env_.node(zid).zone_index;
    if (double(zone_weekly_exposed_[size_t(zi)]) <= pol.exposed_threshold) continue;
    double factor = 1.0 - pol.reduction_pct / 100.0;
    std::vector<EventLog::PatchChange> changes;
    const auto& zone = env_.node(zid);
    for (int p = zone.first_patch;
         p < zone.first_patch + zone.patch_cols * zone.patch_rows; ++p) {
      auto& ps = patch_state_[size_t(p)];
      EventLog::PatchChange ch;
      ch.patch = p;
      ch.s_pre = ps.s_v;
      ch.e_pre = ps.e_v;
      ch.i_pre = ps.i_v;
      ps.s_v *= factor;
      ps.e_v *= factor;
      ps.i_v *= factor;
      ch.s_post = ps.s_v;
      ch.e_post = ps.e_v;
      ch.i_post = ps.i_v;
      changes.push_back(ch);
      ++patch_interventions_today_[size_t(p)];
    }
    log_->vector_control(day, zone.name, pol.reduction_pct, changes);
    ++summary_.vector_control_events;
  }
  std::fill(zone_weekly_exposed_.begin(), zone_weekly_exposed_.end(), 0);
}

int64_t Engine::infectious_count() const {
  int64_t n = 0;
  for (const auto& a : agents_) n += disease::is_infectious(a.state);
  return n;
}

void Engine::day_start(int day) {
  day_ = day;
  due_.assign(kMinutesPerDay, {});
  std::fill(patch_interventions_today_.begin(), patch_interventions_today_.end(), 0);
  int64_t day0 = int64_t(day) * kMinutesPerDay;

  // Quarantine releases before anything else touches positions.
  for (auto& a : agents_) {
    AgentRt& rt = rt_[size_t(a.id)];
    if (rt.pos == Pos::Quarantine && !a.in_quarantine(day) && a.alive()) {
      rt.pos = Pos::Location;
      rt.at = a.home;
      occupancy_add(a.id);
    }
  }

  hospitalize_checks(day);
  if (sc_.kind == DiseaseKind::airborne) {
    if (sc_.pcr.enabled && day % sc_.pcr.cadence_days == 0) pcr_and_trace(day);
    vaccination_checks(day);
  } else {
    if (sc_.vector_control.enabled && day > 0 &&
        day % sc_.vector_control.period_days == 0)
      vector_control_check(day);
    for (size_t p = 0; p < env_.patches().size(); ++p) {
      core::Rng rng = core::derive_stream(sc_.seed, "tinc", uint64_t(p), uint64_t(day));
      bool above = false;
      double tinc = disease::incubation_days(patch_temp_[p], rng, &above);
      patch_state_[p].nu_v = 1.0 / tinc;
      if (above && day == 0)
        summary_.diagnostics.push_back(
            "patch " + std::to_string(p) +
            " temperature above the hottest incubation band; band held");
    }
  }

  // Fresh timetables for everyone free to move.
  for (auto& a : agents_) {
    AgentRt& rt = rt_[size_t(a.id)];
    if (!a.alive() || a.hospitalized || a.in_quarantine(day)) continue;
    build_day_plan(a.id, day);
    if (rt.pos == Pos::Location) {
      rt.move_kind = MoveKind::none;
      rt.move_due = -1;
      align_with_plan(a.id, day0);
    }
    // Agents still in transit from yesterday align when they arrive.
  }

  // Register everything already scheduled into today's window.
  for (const auto& a : agents_) {
    const AgentRt& rt = rt_[size_t(a.id)];
    if (a.state_exit_min >= day0 && a.state_exit_min < day0 + kMinutesPerDay)
      schedule_due(a.id, a.state_exit_min);
    if (rt.move_due >= day0 && rt.move_due < day0 + kMinutesPerDay)
      schedule_due(a.id, rt.move_due);
  }
}

void Engine::minute_tick(int64_t now) {
  int mod = int(now - int64_t(day_) * kMinutesPerDay);
  auto& bucket = due_[size_t(mod)];
  if (!bucket.empty()) {
    std::sort(bucket.begin(), bucket.end());
    bucket.erase(std::unique(bucket.begin(), bucket.end()), bucket.end());
    // handle_due may schedule new events for later minutes, never this one.
    std::vector<int> todo = bucket;
    for (int agent : todo) handle_due(agent, now);
  }
  vehicle_phase(now);
  if (sc_.kind == DiseaseKind::airborne) contact_phase(now);
  if (sc_.kind == DiseaseKind::vectorborne && now % sc_.disease_update_min == 0)
    patch_phase(now);
}

void Engine::day_end(int day) {
  // states.csv: one row per class, categories split S,E,I*,Hosp,R,D.
  const size_t n_classes = sc_.classes.size();
  std::vector<std::array<int64_t, kStateColumns>> counts(
      n_classes, std::array<int64_t, kStateColumns>{});
  int64_t exposed = 0, infectious = 0, recovered = 0, dead = 0;
  for (const auto& a : agents_) {
    int col;
    if (!a.alive())
      col = 8;
    else if (a.hospitalized)
      col = 6;
    else
      switch (a.state) {
        case State::Susceptible: col = 0; break;
        case State::Exposed: col = 1; break;
        case State::InfectiousAsymptomatic: col = 2; break;
        case State::InfectiousMild: col = 3; break;
        case State::InfectiousSevere: col = 4; break;
        case State::InfectiousCritical: col = 5; break;
        case State::Recovered: col = 7; break;
        default: col = 8; break;
      }
    ++counts[size_t(a.class_index)][size_t(col)];
    exposed += a.state == State::Exposed;
    infectious += disease::is_infectious(a.state);
    recovered += a.state == State::Recovered;
    dead += !a.alive();
  }
  for (size_t ci = 0; ci < n_classes; ++ci)
    log_->states_row(day, sc_.classes[ci].name, counts[ci]);

  if (sc_.kind == DiseaseKind::vectorborne) {
    for (size_t p = 0; p < env_.patches().size(); ++p) {
      const auto& patch = env_.patches()[p];
      const auto& ps = patch_state_[p];
      log_->patches_row(day, int(p), env_.node(patch.zone).name, ps.s_v, ps.e_v,
                        ps.i_v, patch_temp_[p], patch_interventions_today_[p]);
    }
  }

  summary_.exposed_series.push_back(exposed);
  summary_.infectious_series.push_back(infectious);
  summary_.recovered_series.push_back(recovered);
  summary_.peak_infectious = std::max(summary_.peak_infectious, infectious);
  summary_.final_recovered = recovered;
  summary_.final_dead = dead;

  // Roll the tracing window.
  for (auto& [agent, partners] : contacts_today_) {
    std::sort(partners.begin(), partners.end());
    partners.erase(std::unique(partners.begin(), partners.end()), partners.end());
  }
  contact_window_.push_back(std::move(contacts_today_));
  contacts_today_.clear();
  while (int(contact_window_.size()) > sc_.pcr.trace_window_days)
    contact_window_.pop_front();
}

RunSummary Engine::run(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  EventLog log(out_dir, sc_.log_contacts, sc_.write_agents);
  log_ = &log;

  // Reset world state so run() is self-contained.
  summary_ = RunSummary{};
  summary_.population = int(agents_.size());
  rt_.assign(agents_.size(), AgentRt{});
  occupancy_.assign(env_.nodes().size(), {});
  node_infectious_.assign(env_.nodes().size(), 0);
  node_susceptible_.assign(env_.nodes().size(), 0);
  active_nodes_.clear();
  waiting_.clear();
  taxis_.clear();
  patch_state_.assign(env_.patches().size(), disease::PatchState{});
  patch_temp_.resize(env_.patches().size());
  patch_interventions_today_.assign(env_.patches().size(), 0);
  zone_weekly_exposed_.assign(env_.zones().size(), 0);
  vaccination_fired_.assign(sc_.vaccinations.size(), false);
  due_.assign(kMinutesPerDay, {});
  contact_window_.clear();
  contacts_today_.clear();
  for (auto& h : history_) h.clear();
  for (auto& a : agents_) {
    a.state = State::Susceptible;
    a.pending_next = State::Recovered;
    a.state_entered_min = 0;
    a.state_exit_min = -1;
    a.transition_ordinal = 0;
    a.hospitalized = false;
    a.quarantine_until_day = -1;
  }

  for (size_t p = 0; p < env_.patches().size(); ++p) {
    patch_temp_[p] = std::isnan(sc_.patch_temperature_override)
                         ? env_.patches()[p].temperature_c
                         : sc_.patch_temperature_override;
    if (sc_.kind == DiseaseKind::vectorborne)
      patch_state_[p].s_v = sc_.vector_seed.initial_fill * env_.patches()[p].capacity;
  }

  for (auto& a : agents_) {
    rt_[size_t(a.id)].pos = Pos::Location;
    rt_[size_t(a.id)].at = a.home;
    occupancy_add(a.id);
  }
  seed_initial_infections();

  for (int day = 0; day < sc_.duration_days; ++day) {
    day_start(day);
    int64_t day0 = int64_t(day) * kMinutesPerDay;
    for (int mod = 0; mod < kMinutesPerDay; ++mod) minute_tick(day0 + mod);
    day_end(day);
  }

  if (sc_.write_agents) {
    for (const auto& a : agents_) {
      std::ostringstream os;
      os << "{\"id\":" << a.id << ",\"class\":\""
         << sc_.classes[size_t(a.class_index)].name << "\",\"subclass\":\""
         << sc_.classes[size_t(a.class_index)].subclasses[size_t(a.subclass_index)].name
         << "\",\"age\":" << a.age << ",\"home\":\"" << env_.node(a.home).name
         << "\",\"work\":\"" << env_.node(a.work).name << "\",\"final_state\":\""
         << disease::state_name(a.state) << "\",\"transitions\":[";
      const auto& h = history_[size_t(a.id)];
      for (size_t i = 0; i < h.size(); ++i) {
        if (i) os << ',';
        os << "{\"minute\":" << h[i].minute << ",\"from\":\""
           << disease::state_name(h[i].from) << "\",\"to\":\""
           << disease::state_name(h[i].to) << "\"}";
      }
      os << "]}";
      log.agent_line(os.str());
    }
  }
  log.flush();
  log_ = nullptr;
  return summary_;
}

}  // namespace avsim::sim
