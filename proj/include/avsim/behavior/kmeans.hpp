#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace avsim::behavior {

struct KMeansResult {
  std::vector<int> labels;
  double inertia = 0.0;
};

// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed seed;
// keeps the best of `restarts` runs by inertia.
KMeansResult kmeans(const Eigen::MatrixXd& rows, int k, uint64_t seed,
                    int restarts = 10, int max_iters = 100);

}  // namespace avsim::behavior
