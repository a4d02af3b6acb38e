#include "avsim/mobility/dbscan.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace avsim::mobility {

namespace {

struct CellKey {
  int32_t cx;
  int32_t cy;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  size_t operator()(const CellKey& k) const {
    uint64_t h = (uint64_t(uint32_t(k.cx)) << 32) | uint32_t(k.cy);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return size_t(h);
  }
};

// Uniform grid with cell size eps; the eps-ball around a point is covered by
// the 3x3 block of cells around it.
class Grid {
 public:
  Grid(std::span<const Point2> pts, double eps) : pts_(pts), inv_(1.0 / eps) {
    cells_.reserve(pts.size());
    for (size_t i = 0; i < pts.size(); ++i)
      cells_[key(pts[i])].push_back(int(i));
  }

  template <typename F>
  void for_neighbors(int i, double eps2, F&& fn) const {
    CellKey k = key(pts_[i]);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(CellKey{k.cx + dx, k.cy + dy});
        if (it == cells_.end()) continue;
        for (int j : it->second) {
          double ddx = pts_[i].x - pts_[j].x;
          double ddy = pts_[i].y - pts_[j].y;
          if (ddx * ddx + ddy * ddy <= eps2) fn(j);
        }
      }
    }
  }

 private:
  CellKey key(const Point2& p) const {
    return CellKey{int32_t(std::floor(p.x * inv_)), int32_t(std::floor(p.y * inv_))};
  }
  std::span<const Point2> pts_;
  double inv_;
  std::unordered_map<CellKey, std::vector<int>, CellHash> cells_;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) {
    for (size_t i = 0; i < n; ++i) parent[i] = int(i);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b < a ? a : b] = b < a ? b : a;  // smaller index wins
  }
};

}  // namespace

std::vector<int> dbscan(std::span<const Point2> points, double eps, int min_pts) {
  if (eps <= 0.0) throw std::invalid_argument("dbscan: eps must be positive");
  if (min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");
  const size_t n = points.size();
  std::vector<int> labels(n, kNoise);
  if (n == 0) return labels;

  Grid grid(points, eps);
  const double eps2 = eps * eps;

  std::vector<char> core(n, 0);
  for (size_t i = 0; i < n; ++i) {
    int count = 0;
    grid.for_neighbors(int(i), eps2, [&](int) { ++count; });
    core[i] = count >= min_pts;
  }

  UnionFind uf(n);
  for (size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    grid.for_neighbors(int(i), eps2, [&](int j) {
      if (core[j]) uf.unite(int(i), int(j));
    });
  }

  // Components keep the minimum core index as root, so ascending iteration
  // assigns dense cluster ids in canonical order.
  std::vector<int> cluster_of_root(n, -1);
  int next_cluster = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    int root = uf.find(int(i));
    if (cluster_of_root[root] < 0) cluster_of_root[root] = next_cluster++;
    labels[i] = cluster_of_root[root];
  }

  for (size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    int best_core = -1;
    grid.for_neighbors(int(i), eps2, [&](int j) {
      if (core[j] && (best_core < 0 || j < best_core)) best_core = j;
    });
    if (best_core >= 0) labels[i] = labels[best_core];
  }
  return labels;
}

}  // namespace avsim::mobility
