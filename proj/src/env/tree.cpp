#include "avsim/env/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "avsim/core/rng.hpp"

namespace avsim::env {

namespace {

void check(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error("environment config: " + msg);
}

}  // namespace

Environment Environment::from_json_file(const std::string& path, uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open environment config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), seed);
}

Environment Environment::from_json_text(const std::string& text, uint64_t seed) {
  nlohmann::json j = nlohmann::json::parse(text);
  Environment env;
  env.name_ = j.value("name", "environment");

  if (j.contains("patches")) {
    const auto& p = j["patches"];
    env.patch_config_.cell_m = p.value("cell_m", 500.0);
    if (p.contains("carrying_capacity")) {
      env.patch_config_.kv_min = p["carrying_capacity"].at(0).get<double>();
      env.patch_config_.kv_max = p["carrying_capacity"].at(1).get<double>();
    }
    env.patch_config_.temperature_c = p.value("temperature_c", 27.0);
    env.patch_config_.rainfall_mm = p.value("rainfall_mm", 0.0);
    env.patch_config_.humidity_pct = p.value("humidity_pct", 70.0);
  }
  if (j.contains("transport")) {
    const auto& t = j["transport"];
    auto& tc = env.transport_;
    if (t.contains("edge_minutes")) {
      const auto& e = t["edge_minutes"];
      tc.location_zone_min = e.value("location_zone", tc.location_zone_min);
      tc.zone_city_min = e.value("zone_city", tc.zone_city_min);
      tc.city_city_min = e.value("city_city", tc.city_city_min);
    }
    if (t.contains("intracity")) {
      const auto& b = t["intracity"];
      tc.intracity_headway_min = b.value("headway_min", tc.intracity_headway_min);
      tc.intracity_capacity = b.value("capacity", tc.intracity_capacity);
      tc.intracity_dwell_min = b.value("dwell_min", tc.intracity_dwell_min);
    }
    if (t.contains("intercity")) {
      const auto& b = t["intercity"];
      tc.intercity_headway_min = b.value("headway_min", tc.intercity_headway_min);
      tc.intercity_capacity = b.value("capacity", tc.intercity_capacity);
      tc.intercity_dwell_min = b.value("dwell_min", tc.intercity_dwell_min);
    }
    if (t.contains("taxi")) {
      const auto& x = t["taxi"];
      tc.taxi_capacity = x.value("capacity", tc.taxi_capacity);
      tc.taxi_dispatch_min = x.value("dispatch_min", tc.taxi_dispatch_min);
    }
  }

  EnvNode root;
  root.id = 0;
  root.kind = NodeKind::root;
  root.name = env.name_;
  root.depth = 0;
  env.nodes_.push_back(root);

  std::set<std::string> city_names, zone_names;
  uint32_t max_locs_per_zone = 1;
  check(j.contains("cities") && !j["cities"].empty(), "no cities defined");
  for (const auto& cj : j["cities"]) {
    EnvNode city;
    city.id = NodeId(env.nodes_.size());
    city.kind = NodeKind::city;
    city.name = cj.at("name").get<std::string>();
    check(city_names.insert(city.name).second, "duplicate city name '" + city.name + "'");
    city.parent = 0;
    city.depth = 1;
    env.nodes_.push_back(city);
    env.nodes_[0].children.push_back(city.id);
    env.cities_.push_back(city.id);

    check(cj.contains("zones") && !cj["zones"].empty(),
          "city '" + city.name + "' has no zones");
    for (const auto& zj : cj["zones"]) {
      EnvNode zone;
      zone.id = NodeId(env.nodes_.size());
      zone.kind = NodeKind::zone;
      zone.name = zj.at("name").get<std::string>();
      check(zone_names.insert(zone.name).second,
            "duplicate zone name '" + zone.name + "'");
      zone.parent = city.id;
      zone.depth = 2;
      zone.zone_class = zj.at("class").get<std::string>();
      const auto& r = zj.at("rect_m");
      zone.x = r.at(0).get<double>();
      zone.y = r.at(1).get<double>();
      zone.w = r.at(2).get<double>();
      zone.h = r.at(3).get<double>();
      check(zone.w > 0 && zone.h > 0, "zone '" + zone.name + "' rect is empty");
      zone.zone_index = int(env.zones_.size());
      env.nodes_.push_back(zone);
      env.nodes_[size_t(city.id)].children.push_back(zone.id);
      env.zones_.push_back(zone.id);
      env.zone_names_[zone.name] = zone.id;

      std::vector<std::string> loc_names;
      if (zj.contains("locations"))
        for (const auto& lj : zj["locations"])
          loc_names.push_back(lj.get<std::string>());
      if (zj.contains("locations_auto")) {
        const auto& a = zj["locations_auto"];
        std::string prefix = a.value("prefix", "loc");
        int count = a.at("count").get<int>();
        for (int i = 0; i < count; ++i)
          loc_names.push_back(zone.name + "/" + prefix + "_" + std::to_string(i));
      }
      check(!loc_names.empty(), "zone '" + zone.name + "' has no locations");
      {
        std::set<std::string> seen;
        for (const auto& nm : loc_names)
          check(seen.insert(nm).second,
                "duplicate location '" + nm + "' in zone '" + zone.name + "'");
      }
      max_locs_per_zone = std::max<uint32_t>(max_locs_per_zone,
                                             uint32_t(loc_names.size()));

      // Deterministic grid placement inside the zone rectangle.
      int cols = int(std::ceil(std::sqrt(double(loc_names.size()))));
      int rows = (int(loc_names.size()) + cols - 1) / cols;
      NodeId zid = zone.id;
      for (size_t i = 0; i < loc_names.size(); ++i) {
        EnvNode loc;
        loc.id = NodeId(env.nodes_.size());
        loc.kind = NodeKind::location;
        loc.name = loc_names[i];
        loc.parent = zid;
        loc.depth = 3;
        loc.loc_index = int(i);
        const EnvNode& z = env.nodes_[size_t(zid)];
        loc.x = z.x + (double(i % size_t(cols)) + 0.5) * z.w / cols;
        loc.y = z.y + (double(i / size_t(cols)) + 0.5) * z.h / rows;
        env.nodes_.push_back(loc);
        env.nodes_[size_t(zid)].children.push_back(loc.id);
        env.locations_.push_back(loc.id);
        env.by_zone_class_[env.nodes_[size_t(zid)].zone_class].push_back(loc.id);
      }
    }
  }

  env.page_ = mobility::CodePage::fit(uint32_t(env.zones_.size()), max_locs_per_zone);

  // Patch grid per zone; partial edge cells are clipped and flagged.
  const auto& pc = env.patch_config_;
  for (NodeId zid : env.zones_) {
    EnvNode& zone = env.nodes_[size_t(zid)];
    zone.patch_cols = int(std::ceil(zone.w / pc.cell_m));
    zone.patch_rows = int(std::ceil(zone.h / pc.cell_m));
    zone.first_patch = int(env.patches_.size());
    for (int r = 0; r < zone.patch_rows; ++r) {
      for (int c = 0; c < zone.patch_cols; ++c) {
        Patch p;
        p.id = int(env.patches_.size());
        p.zone = zid;
        p.x0 = zone.x + c * pc.cell_m;
        p.y0 = zone.y + r * pc.cell_m;
        p.w = std::min(pc.cell_m, zone.x + zone.w - p.x0);
        p.h = std::min(pc.cell_m, zone.y + zone.h - p.y0);
        p.partial = p.w < pc.cell_m || p.h < pc.cell_m;
        core::Rng rng = core::derive_stream(seed, "patch_kv", uint64_t(p.id));
        p.capacity = rng.uniform(pc.kv_min, pc.kv_max);
        p.temperature_c = pc.temperature_c;
        p.rainfall_mm = pc.rainfall_mm;
        p.humidity_pct = pc.humidity_pct;
        env.patches_.push_back(p);
      }
    }
  }

  env.patch_of_location_.assign(env.nodes_.size(), -1);
  for (NodeId lid : env.locations_) {
    const EnvNode& loc = env.nodes_[size_t(lid)];
    const EnvNode& zone = env.nodes_[size_t(loc.parent)];
    int c = std::min(zone.patch_cols - 1, int((loc.x - zone.x) / pc.cell_m));
    int r = std::min(zone.patch_rows - 1, int((loc.y - zone.y) / pc.cell_m));
    env.patch_of_location_[size_t(lid)] = zone.first_patch + r * zone.patch_cols + c;
  }
  return env;
}

NodeId Environment::zone_by_name(const std::string& name) const {
  auto it = zone_names_.find(name);
  if (it == zone_names_.end())
    throw std::runtime_error("unknown zone '" + name + "'");
  return it->second;
}

NodeId Environment::city_of(NodeId id) const {
  while (id != kNoNode && node(id).kind != NodeKind::city) id = node(id).parent;
  return id;
}

const std::vector<NodeId>& Environment::locations_of_class(
    const std::string& zone_class) const {
  static const std::vector<NodeId> empty;
  auto it = by_zone_class_.find(zone_class);
  return it == by_zone_class_.end() ? empty : it->second;
}

std::vector<NodeId> Environment::route(NodeId from, NodeId to) const {
  std::vector<NodeId> up, down;
  NodeId a = from, b = to;
  while (node(a).depth > node(b).depth) {
    up.push_back(a);
    a = node(a).parent;
  }
  while (node(b).depth > node(a).depth) {
    down.push_back(b);
    b = node(b).parent;
  }
  while (a != b) {
    up.push_back(a);
    down.push_back(b);
    a = node(a).parent;
    b = node(b).parent;
  }
  up.push_back(a);  // the LCA
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

double Environment::edge_minutes(NodeId child) const {
  switch (node(child).kind) {
    case NodeKind::location:
      return transport_.location_zone_min;
    case NodeKind::zone:
      return transport_.zone_city_min;
    case NodeKind::city:
      return transport_.city_city_min / 2.0;  // city-root-city totals one hop
    default:
      return 0.0;
  }
}

double Environment::private_travel_minutes(NodeId from, NodeId to) const {
  auto path = route(from, to);
  double total = 0.0;
  for (size_t i = 1; i < path.size(); ++i) {
    // Each step crosses the edge between a node and its parent.
    NodeId child = node(path[i]).depth > node(path[i - 1]).depth ? path[i] : path[i - 1];
    total += edge_minutes(child);
  }
  return total;
}

std::vector<int> Environment::patch_neighborhood(NodeId loc) const {
  const EnvNode& zone = node(node(loc).parent);
  int base = patch_of_location(loc) - zone.first_patch;
  int r0 = base / zone.patch_cols;
  int c0 = base % zone.patch_cols;
  std::vector<int> out;
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) {
      int r = r0 + dr, c = c0 + dc;
      if (r < 0 || r >= zone.patch_rows || c < 0 || c >= zone.patch_cols) continue;
      out.push_back(zone.first_patch + r * zone.patch_cols + c);
    }
  return out;
}

uint32_t Environment::code_of_location(NodeId loc) const {
  const EnvNode& l = node(loc);
  const EnvNode& z = node(l.parent);
  return page_.encode(uint32_t(z.zone_index), uint32_t(l.loc_index));
}

}  // namespace avsim::env
