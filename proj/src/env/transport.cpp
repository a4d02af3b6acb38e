#include "avsim/env/transport.hpp"

#include <algorithm>

namespace avsim::env {

void TransportSystem::build(const Environment& env) {
  lines_.clear();
  vehicles_.clear();
  const auto& tc = env.transport();

  auto add_line = [&](BusLine line) {
    line.id = int(lines_.size());
    int count = std::max(1, line.loop_min() / line.headway_min);
    for (int v = 0; v < count; ++v) {
      Vehicle veh;
      veh.id = int(vehicles_.size());
      veh.line = line.id;
      veh.kind = line.kind;
      veh.capacity = line.capacity;
      veh.offset_min = v * line.headway_min;
      vehicles_.push_back(std::move(veh));
    }
    lines_.push_back(std::move(line));
  };

  for (NodeId cid : env.cities()) {
    const EnvNode& city = env.node(cid);
    if (city.children.size() < 2) continue;
    BusLine line;
    line.kind = VehicleKind::intracity_bus;
    line.city = cid;
    line.stops.assign(city.children.begin(), city.children.end());
    line.interstop_min = int(tc.zone_city_min);
    line.dwell_min = tc.intracity_dwell_min;
    line.headway_min = tc.intracity_headway_min;
    line.capacity = tc.intracity_capacity;
    add_line(std::move(line));
  }
  if (env.cities().size() >= 2) {
    BusLine line;
    line.kind = VehicleKind::intercity_bus;
    line.stops.assign(env.cities().begin(), env.cities().end());
    line.interstop_min = int(tc.city_city_min);
    line.dwell_min = tc.intercity_dwell_min;
    line.headway_min = tc.intercity_headway_min;
    line.capacity = tc.intercity_capacity;
    add_line(std::move(line));
  }
}

TransportSystem::Position TransportSystem::position(const Vehicle& v,
                                                    int64_t minute) const {
  Position pos;
  if (v.kind == VehicleKind::taxi) {
    // Taxis are point-to-point; they never dwell at stops.
    return pos;
  }
  const BusLine& line = lines_.at(size_t(v.line));
  int64_t t = (minute + v.offset_min) % line.loop_min();
  pos.stop_index = int(t / line.cycle_min());
  int within = int(t % line.cycle_min());
  pos.dwelling = within < line.dwell_min;
  pos.node = pos.dwelling ? line.stops[size_t(pos.stop_index)] : kNoNode;
  return pos;
}

std::vector<int> TransportSystem::dwelling_at(NodeId node, int64_t minute) const {
  std::vector<int> out;
  for (const auto& v : vehicles_) {
    if (v.kind == VehicleKind::taxi) continue;
    Position p = position(v, minute);
    if (p.dwelling && p.node == node) out.push_back(v.id);
  }
  return out;
}

int TransportSystem::find_line(NodeId stop_a, NodeId stop_b) const {
  for (const auto& line : lines_) {
    bool a = std::find(line.stops.begin(), line.stops.end(), stop_a) != line.stops.end();
    bool b = std::find(line.stops.begin(), line.stops.end(), stop_b) != line.stops.end();
    if (a && b) return line.id;
  }
  return -1;
}

int TransportSystem::ride_minutes(int line_id, NodeId stop_a, NodeId stop_b) const {
  const BusLine& line = lines_.at(size_t(line_id));
  auto index_of = [&](NodeId n) {
    return int(std::find(line.stops.begin(), line.stops.end(), n) - line.stops.begin());
  };
  int ia = index_of(stop_a), ib = index_of(stop_b);
  int hops = (ib - ia + int(line.stops.size())) % int(line.stops.size());
  return hops * line.cycle_min();
}

std::vector<LegPlan> plan_legs(const Environment& env, const TransportSystem& ts,
                               std::span<const NodeId> stay_leaves,
                               double public_preference, core::Rng& rng) {
  std::vector<LegPlan> legs;
  for (size_t i = 1; i < stay_leaves.size(); ++i) {
    if (stay_leaves[i] == stay_leaves[i - 1]) continue;
    LegPlan leg;
    leg.from = stay_leaves[i - 1];
    leg.to = stay_leaves[i];
    bool wants_public = rng.next_double() < public_preference;
    if (wants_public) {
      NodeId zone_from = env.zone_of_location(leg.from);
      NodeId zone_to = env.zone_of_location(leg.to);
      NodeId city_from = env.city_of(leg.from);
      NodeId city_to = env.city_of(leg.to);
      int line = -1;
      NodeId board = kNoNode, alight = kNoNode;
      if (city_from == city_to && zone_from != zone_to) {
        line = ts.find_line(zone_from, zone_to);
        board = zone_from;
        alight = zone_to;
      } else if (city_from != city_to) {
        line = ts.find_line(city_from, city_to);
        board = city_from;
        alight = city_to;
      }
      if (line >= 0) {
        leg.public_mode = true;
        leg.line = line;
        leg.board_stop = board;
        leg.alight_stop = alight;
      } else {
        leg.fallback_private = true;
      }
    }
    legs.push_back(leg);
  }
  return legs;
}

}  // namespace avsim::env
