#include "avsim/behavior/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "avsim/behavior/kmeans.hpp"
#include "avsim/core/parallel.hpp"
#include "avsim/core/text.hpp"
#include "avsim/core/time.hpp"

namespace avsim::behavior {

double similarity(std::span<const double> xi, std::span<const double> xj,
                  const SpectralParams& p, bool diagonal) {
  if (diagonal) return p.self_similarity;
  if (xi.size() != xj.size())
    throw std::invalid_argument("similarity: day vectors differ in length");
  double d2 = 0.0;
  for (size_t t = 0; t < xi.size(); ++t) {
    double d = xi[t] - xj[t];
    d2 += d * d;
  }
  return std::exp(-d2 / (2.0 * p.sigma * p.sigma));
}

Eigen::MatrixXd build_adjacency(const std::vector<DayVector>& days,
                                const SpectralParams& p) {
  const int n = int(days.size());
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = p.self_similarity;
    for (int j = i + 1; j < n; ++j) {
      double s = similarity(days[i].values, days[j].values, p, false);
      a(i, j) = s;
      a(j, i) = s;
    }
  }
  return a;
}

Eigen::MatrixXd build_laplacian(const Eigen::MatrixXd& adjacency) {
  const long n = adjacency.rows();
  if (n < 2) throw std::invalid_argument("build_laplacian: need at least 2 days");
  Eigen::VectorXd degree = adjacency.rowwise().sum();
  Eigen::VectorXd dinv_sqrt(n);
  for (long i = 0; i < n; ++i) {
    if (degree[i] <= 0.0)
      throw std::domain_error("build_laplacian: zero row sum (set self-similarity > 0)");
    dinv_sqrt[i] = 1.0 / std::sqrt(degree[i]);
  }
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n) -
                      dinv_sqrt.asDiagonal() * adjacency * dinv_sqrt.asDiagonal();
  return (l + l.transpose()) / 2.0;  // enforce exact symmetry
}

std::vector<double> default_sigma_grid(const std::vector<DayVector>& days) {
  std::vector<double> dists;
  for (size_t i = 0; i < days.size(); ++i)
    for (size_t j = i + 1; j < days.size(); ++j) {
      double d2 = 0.0;
      for (size_t t = 0; t < days[i].values.size(); ++t) {
        double d = days[i].values[t] - days[j].values[t];
        d2 += d * d;
      }
      dists.push_back(std::sqrt(d2));
    }
  double median = 1.0;
  if (!dists.empty()) {
    std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
    median = dists[dists.size() / 2];
    if (median <= 0.0) median = 1.0;
  }
  constexpr int kPoints = 32;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    double e = -2.0 + 3.0 * double(i) / double(kPoints - 1);  // 0.01x .. 10x
    grid[i] = median * std::pow(10.0, e);
  }
  return grid;
}

SigmaSweep sigma_sweep(const std::vector<DayVector>& days,
                       const std::vector<double>& grid,
                       const std::vector<std::pair<int, int>>& modes,
                       double self_similarity, int threads) {
  if (grid.empty()) throw std::invalid_argument("sigma_sweep: empty grid");
  for (size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::invalid_argument("sigma_sweep: grid must be strictly increasing");

  SigmaSweep sweep;
  sweep.grid = grid;
  for (const auto& m : modes) sweep.curves.push_back({m, std::vector<double>(grid.size())});

  const int n = int(days.size());
  std::vector<std::string> errors(grid.size());
  std::vector<Eigen::VectorXd> spectra(grid.size());
  core::parallel_for(grid.size(), threads, [&](size_t g) {
    SpectralParams p{grid[g], self_similarity};
    Eigen::MatrixXd l = build_laplacian(build_adjacency(days, p));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.compute(l, Eigen::EigenvaluesOnly);
    if (solver.info() == Eigen::Success)
      spectra[g] = solver.eigenvalues();  // ascending
    else
      errors[g] = "eigensolver failed at sigma " + core::fmt_exact(grid[g]);
  });

  for (size_t g = 0; g < grid.size(); ++g) {
    if (!errors[g].empty()) {
      sweep.diagnostics.push_back(errors[g]);
      for (auto& c : sweep.curves) c.gaps[g] = std::nan("");
      continue;
    }
    for (auto& c : sweep.curves) {
      int x = c.mode.first, y = c.mode.second;
      if (x < 1 || y > n || y != x + 1) {
        c.gaps[g] = std::nan("");
        continue;
      }
      c.gaps[g] = spectra[g][y - 1] - spectra[g][x - 1];
    }
  }
  return sweep;
}

ModeSelection select_mode(const SigmaSweep& sweep) {
  ModeSelection best;
  bool found = false;
  for (const auto& curve : sweep.curves) {
    for (size_t g = 0; g < sweep.grid.size(); ++g) {
      double gap = curve.gaps[g];
      if (std::isnan(gap)) continue;
      // Strict comparison keeps the first maximum: lower mode, smaller sigma.
      if (!found || gap > best.gap) {
        best.gap = gap;
        best.mode = curve.mode;
        best.cluster_count = curve.mode.first;
        best.sigma = sweep.grid[g];
        found = true;
      }
    }
  }
  if (!found)
    throw std::domain_error("select_mode: all gap curves are NaN");
  return best;
}

ClusterResult spectral_cluster(const std::vector<DayVector>& days, int k,
                               double sigma, double self_similarity,
                               uint64_t seed) {
  const int n = int(days.size());
  if (k < 1 || k > n) throw std::invalid_argument("spectral_cluster: k out of range");
  SpectralParams p{sigma, self_similarity};
  Eigen::MatrixXd l = build_laplacian(build_adjacency(days, p));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_cluster: eigendecomposition failed");

  ClusterResult result;
  int dims = k;
  // A repeated eigenvalue straddling the cut makes the k-dimensional
  // subspace ill-defined; widen to the full eigenspace of that value.
  constexpr double kTol = 1e-10;
  while (dims < n &&
         std::abs(solver.eigenvalues()[dims] - solver.eigenvalues()[k - 1]) <= kTol) {
    ++dims;
    result.degenerate_widened = true;
  }
  result.embedding_dims = dims;
  Eigen::MatrixXd embedding = solver.eigenvectors().leftCols(dims);
  result.labels = kmeans(embedding, k, seed).labels;
  return result;
}

std::vector<DayVector> day_vectors_from_records(
    std::span<const mobility::TimeLocationRecord> records) {
  std::map<std::pair<std::string, int>, DayVector> acc;
  for (const auto& r : records) {
    auto key = std::make_pair(r.participant, r.day_index);
    auto it = acc.find(key);
    if (it == acc.end()) {
      DayVector dv;
      dv.participant = r.participant;
      dv.day_index = r.day_index;
      dv.values.assign(core::kMinutesPerDay, double(mobility::kInTransit));
      it = acc.emplace(key, std::move(dv)).first;
    }
    it->second.values.at(size_t(r.minute)) = double(r.code);
  }
  std::vector<DayVector> out;
  out.reserve(acc.size());
  for (auto& [key, dv] : acc) out.push_back(std::move(dv));
  return out;
}

double rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("rand_index: need two labelings of equal size >= 2");
  size_t agree = 0, total = 0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = i + 1; j < a.size(); ++j) {
      bool sa = a[i] == a[j];
      bool sb = b[i] == b[j];
      agree += sa == sb;
      ++total;
    }
  return double(agree) / double(total);
}

}  // namespace avsim::behavior
