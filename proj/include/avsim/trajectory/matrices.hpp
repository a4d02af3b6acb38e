#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "avsim/core/rng.hpp"
#include "avsim/mobility/labeling.hpp"

namespace avsim::traj {

// Paired per-class, per-day-type mobility statistics:
//   visit(l, t)     = probability of being at location row l at minute t
//                     (every column sums to 1)
//   occupancy(l, d) = probability that a stay at l lasts exactly d+1 minutes
//                     (rows with any mass sum to 1)
struct ProbabilityMatrices {
  std::vector<uint16_t> codes;      // row -> numeric location code
  std::vector<std::string> labels;  // row -> semantic label
  Eigen::MatrixXd visit;            // n_rows x 1440
  Eigen::MatrixXd occupancy;        // n_rows x 1440

  int rows() const { return int(codes.size()); }
  int row_of(uint16_t code) const;  // -1 if absent

  // Builds sampling caches and checks the stochasticity invariants.
  void finalize();

  bool finalized() const { return visit_cum_.size() > 0; }
  const Eigen::MatrixXd& visit_cumulative() const { return visit_cum_; }
  const Eigen::MatrixXd& occupancy_cumulative() const { return occupancy_cum_; }

 private:
  Eigen::MatrixXd visit_cum_;      // cumulative down each column
  Eigen::MatrixXd occupancy_cum_;  // cumulative along each row
};

struct Stay {
  int location_row = 0;
  int start_minute = 0;
  int duration = 0;  // minutes, >= 1
};

struct DailyTrajectory {
  std::vector<int> minutes;  // length 1440, location row per minute
  std::vector<Stay> stays;   // partition of [0, 1440)
  bool empty_row_fallback = false;  // a sampled location had no duration mass
};

// Empirical estimation from complete labeled days of one sub-class and day
// type. Stays are maximal same-location runs within a day; alpha is optional
// Laplace smoothing (0 = pure empirical).
ProbabilityMatrices estimate_matrices(
    std::span<const mobility::TimeLocationRecord> records, double alpha = 0.0);
ProbabilityMatrices estimate_matrices_from_days(
    const std::vector<std::vector<uint16_t>>& days,
    const std::vector<std::pair<uint16_t, std::string>>& vocabulary,
    double alpha = 0.0);

// Roulette-wheel synthesis: sample a location from the visit column at the
// current minute, then a feasible duration from that location's occupancy row
// (renormalized to what fits in the rest of the day), and repeat.
DailyTrajectory generate_trajectory(const ProbabilityMatrices& m,
                                    core::Rng& rng);

struct DistributionFit {
  std::vector<double> per_minute_tv;  // length 1440
  double mean_tv = 0.0;
};

// Per-minute total-variation distance between the empirical location
// distribution of the trajectories and the visit matrix columns.
DistributionFit validate_distribution(std::span<const DailyTrajectory> trajectories,
                                      const ProbabilityMatrices& m);

// Plain-text serialization (documented in the README).
void write_matrices(std::ostream& out, const ProbabilityMatrices& m);
ProbabilityMatrices read_matrices(std::istream& in);
ProbabilityMatrices read_matrices_file(const std::string& path);

}  // namespace avsim::traj
