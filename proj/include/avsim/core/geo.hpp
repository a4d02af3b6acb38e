#pragma once

#include <cmath>
#include <numbers>

namespace avsim::core {

inline constexpr double kEarthRadiusM = 6371000.0;

// Equirectangular projection about a fixed origin. Adequate at district
// scale; error grows with distance from the origin.
struct LocalProjection {
  double lat0_deg = 0.0;
  double lon0_deg = 0.0;

  struct XY {
    double x_m;
    double y_m;
  };

  XY to_xy(double lat_deg, double lon_deg) const {
    constexpr double rad = std::numbers::pi / 180.0;
    double x = kEarthRadiusM * (lon_deg - lon0_deg) * rad * std::cos(lat0_deg * rad);
    double y = kEarthRadiusM * (lat_deg - lat0_deg) * rad;
    return {x, y};
  }

  double distance_m(double lat1, double lon1, double lat2, double lon2) const {
    XY a = to_xy(lat1, lon1);
    XY b = to_xy(lat2, lon2);
    return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
  }
};

}  // namespace avsim::core
