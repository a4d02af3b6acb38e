#pragma once

#include <span>
#include <vector>

namespace avsim::mobility {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr int kNoise = -1;

// DBSCAN over planar points (meters). A point's eps-neighborhood includes the
// point itself; core points have at least min_pts neighbors. The labeling is
// canonical and order-independent: clusters are numbered 0,1,... by the
// ascending minimum index of their core points, and a border point reachable
// from several clusters joins the one of its lowest-index core neighbor.
std::vector<int> dbscan(std::span<const Point2> points, double eps, int min_pts);

}  // namespace avsim::mobility
