#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "avsim/mobility/labeling.hpp"

namespace avsim::behavior {

// One day of one participant as a 1440-dimensional point of numeric location
// codes. Distances between days use the plain Euclidean norm, so same-zone
// codes stay close and transit minutes count as their own coordinate value.
struct DayVector {
  std::string participant;
  int day_index = 0;
  std::vector<double> values;  // length 1440
};

struct SpectralParams {
  double sigma = 1.0;
  double self_similarity = 1.0;  // mu, the kernel's diagonal value
};

struct EigenGapCurve {
  std::pair<int, int> mode;  // adjacent 1-based indices into sorted eigenvalues
  std::vector<double> gaps;  // one per sigma grid point; NaN on solver failure
};

struct SigmaSweep {
  std::vector<double> grid;
  std::vector<EigenGapCurve> curves;
  std::vector<std::string> diagnostics;
};

struct ModeSelection {
  int cluster_count = 0;
  double sigma = 0.0;
  std::pair<int, int> mode{0, 0};
  double gap = 0.0;
};

struct ClusterResult {
  std::vector<int> labels;
  bool degenerate_widened = false;  // repeated eigenvalue at the cut
  int embedding_dims = 0;
};

double similarity(std::span<const double> xi, std::span<const double> xj,
                  const SpectralParams& p, bool diagonal);

Eigen::MatrixXd build_adjacency(const std::vector<DayVector>& days,
                                const SpectralParams& p);

// L = I - D^{-1/2} A D^{-1/2}; symmetric, eigenvalues in [0, 2].
Eigen::MatrixXd build_laplacian(const Eigen::MatrixXd& adjacency);

inline std::vector<std::pair<int, int>> default_modes() {
  return {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}};
}

// 32 log-spaced points spanning [0.01, 10] x median pairwise distance.
std::vector<double> default_sigma_grid(const std::vector<DayVector>& days);

SigmaSweep sigma_sweep(const std::vector<DayVector>& days,
                       const std::vector<double>& grid,
                       const std::vector<std::pair<int, int>>& modes,
                       double self_similarity = 1.0, int threads = 1);

// Prominent mode = globally maximal gap; ties resolved toward the lower mode
// index, then the smaller sigma. cluster_count is the mode's lower index.
ModeSelection select_mode(const SigmaSweep& sweep);

ClusterResult spectral_cluster(const std::vector<DayVector>& days, int k,
                               double sigma, double self_similarity = 1.0,
                               uint64_t seed = 0);

std::vector<DayVector> day_vectors_from_records(
    std::span<const mobility::TimeLocationRecord> records);

// Agreement between two labelings of the same items (Rand index).
double rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace avsim::behavior
