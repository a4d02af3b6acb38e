#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "avsim/mobility/location_code.hpp"

namespace avsim::env {

using NodeId = int32_t;
inline constexpr NodeId kNoNode = -1;

enum class NodeKind { root, city, zone, location };

struct EnvNode {
  NodeId id = kNoNode;
  NodeKind kind = NodeKind::root;
  std::string name;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
  int depth = 0;

  std::string zone_class;  // zones only
  // Geometry in one global meter frame: zones carry rectangles, locations
  // carry points inside their zone's rectangle.
  double x = 0, y = 0, w = 0, h = 0;

  int zone_index = -1;   // zones: index into the code page
  int loc_index = -1;    // locations: index within their zone
  int first_patch = -1;  // zones: id of their first patch
  int patch_cols = 0;
  int patch_rows = 0;
};

struct Patch {
  int id = -1;
  NodeId zone = kNoNode;
  double x0 = 0, y0 = 0, w = 0, h = 0;
  bool partial = false;  // clipped edge cell
  double capacity = 0;   // K_v
  double temperature_c = 0;
  double rainfall_mm = 0;
  double humidity_pct = 0;
};

struct PatchConfig {
  double cell_m = 500.0;
  double kv_min = 100.0;
  double kv_max = 200.0;
  double temperature_c = 27.0;
  double rainfall_mm = 0.0;
  double humidity_pct = 70.0;
};

struct TransportConfig {
  double location_zone_min = 3.0;
  double zone_city_min = 10.0;
  double city_city_min = 30.0;
  int intracity_headway_min = 15;
  int intracity_capacity = 40;
  int intracity_dwell_min = 1;
  int intercity_headway_min = 60;
  int intercity_capacity = 40;
  int intercity_dwell_min = 2;
  int taxi_capacity = 4;
  int taxi_dispatch_min = 5;
};

// Hierarchical environment: one root, cities, zones, location leaves. Built
// once from config and immutable afterwards.
class Environment {
 public:
  static Environment from_json_file(const std::string& path, uint64_t seed);
  static Environment from_json_text(const std::string& text, uint64_t seed);

  const std::vector<EnvNode>& nodes() const { return nodes_; }
  const EnvNode& node(NodeId id) const { return nodes_.at(size_t(id)); }
  NodeId root() const { return 0; }
  std::span<const NodeId> cities() const { return cities_; }
  std::span<const NodeId> zones() const { return zones_; }
  std::span<const NodeId> locations() const { return locations_; }

  NodeId zone_by_name(const std::string& name) const;
  NodeId city_of(NodeId id) const;
  NodeId zone_of_location(NodeId loc) const { return node(loc).parent; }
  const std::vector<NodeId>& locations_of_class(const std::string& zone_class) const;

  // Ascends from `from` to the lowest common ancestor, then descends to `to`;
  // both endpoints included.
  std::vector<NodeId> route(NodeId from, NodeId to) const;
  double edge_minutes(NodeId child) const;  // cost of the child<->parent edge
  double private_travel_minutes(NodeId from, NodeId to) const;

  const std::vector<Patch>& patches() const { return patches_; }
  std::vector<Patch>& patches() { return patches_; }
  int patch_of_location(NodeId loc) const { return patch_of_location_.at(size_t(loc)); }
  // The 3x3 block of same-zone patch cells centered on the location's cell.
  std::vector<int> patch_neighborhood(NodeId loc) const;

  const mobility::CodePage& code_page() const { return page_; }
  uint32_t code_of_location(NodeId loc) const;

  const TransportConfig& transport() const { return transport_; }
  const PatchConfig& patch_config() const { return patch_config_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::vector<EnvNode> nodes_;
  std::vector<NodeId> cities_, zones_, locations_;
  std::vector<Patch> patches_;
  std::vector<int> patch_of_location_;
  std::map<std::string, std::vector<NodeId>> by_zone_class_;
  std::map<std::string, NodeId> zone_names_;
  mobility::CodePage page_;
  TransportConfig transport_;
  PatchConfig patch_config_;
};

}  // namespace avsim::env
