#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "avsim/core/rng.hpp"
#include "avsim/env/tree.hpp"

namespace avsim::env {

enum class VehicleKind { intercity_bus, intracity_bus, taxi };

struct BusLine {
  int id = -1;
  VehicleKind kind = VehicleKind::intracity_bus;
  NodeId city = kNoNode;  // kNoNode for the intercity line
  std::vector<NodeId> stops;
  int interstop_min = 10;
  int dwell_min = 1;
  int headway_min = 15;
  int capacity = 40;

  int cycle_min() const { return dwell_min + interstop_min; }
  int loop_min() const { return int(stops.size()) * cycle_min(); }
};

struct Vehicle {
  int id = -1;
  int line = -1;  // -1 for taxis
  VehicleKind kind = VehicleKind::intracity_bus;
  int capacity = 40;
  int offset_min = 0;          // stagger within the line's loop
  std::vector<int> occupants;  // agent ids

  // Taxi lifecycle (unused for buses).
  int64_t depart_minute = 0;
  int64_t arrive_minute = 0;
};

// Cyclic bus lines: one intracity line per multi-zone city over its zones,
// one intercity line over all cities. Vehicle positions are pure functions
// of the minute, so stepping never accumulates drift.
class TransportSystem {
 public:
  void build(const Environment& env);

  struct Position {
    bool dwelling = false;
    int stop_index = 0;
    NodeId node = kNoNode;  // stop node while dwelling, else kNoNode
  };
  Position position(const Vehicle& v, int64_t minute) const;

  const std::vector<BusLine>& lines() const { return lines_; }
  std::vector<Vehicle>& vehicles() { return vehicles_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }

  // Bus vehicles dwelling at `node` this minute, ascending id.
  std::vector<int> dwelling_at(NodeId node, int64_t minute) const;

  // Line whose stop list contains both nodes; -1 when none does.
  int find_line(NodeId stop_a, NodeId stop_b) const;

  // Minutes a bus of `line` needs from stop_a to stop_b (riding direction).
  int ride_minutes(int line, NodeId stop_a, NodeId stop_b) const;

 private:
  std::vector<BusLine> lines_;
  std::vector<Vehicle> vehicles_;
};

struct LegPlan {
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  bool public_mode = false;   // true: ride a bus for the trunk segment
  int line = -1;              // bus line for public legs
  NodeId board_stop = kNoNode;
  NodeId alight_stop = kNoNode;
  bool fallback_private = false;  // wanted public, no line available
};

// One leg per consecutive pair of distinct stay locations. Mode is drawn per
// leg from the agent's public-transport preference; public legs pick the line
// covering the trunk of the tree route.
std::vector<LegPlan> plan_legs(const Environment& env, const TransportSystem& ts,
                               std::span<const NodeId> stay_leaves,
                               double public_preference, core::Rng& rng);

}  // namespace avsim::env
