#include "avsim/behavior/kmeans.hpp"

#include <limits>
#include <stdexcept>

#include "avsim/core/rng.hpp"

namespace avsim::behavior {

namespace {

KMeansResult run_once(const Eigen::MatrixXd& rows, int k, core::Rng& rng,
                      int max_iters) {
  const int n = int(rows.rows());
  Eigen::MatrixXd centers(k, rows.cols());

  // k-means++ seeding
  centers.row(0) = rows.row(long(rng.below(uint64_t(n))));
  Eigen::VectorXd d2 =
      (rows.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = d2.sum();
    int pick;
    if (total <= 0.0) {
      pick = int(rng.below(uint64_t(n)));
    } else {
      double x = rng.next_double() * total;
      pick = n - 1;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > x) {
          pick = i;
          break;
        }
      }
    }
    centers.row(c) = rows.row(pick);
    d2 = d2.cwiseMin(
        (rows.rowwise() - centers.row(c)).rowwise().squaredNorm().eval());
  }

  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double d = (rows.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[i]) += rows.row(i);
      ++counts[labels[i]];
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centers.row(c) = sums.row(c) / double(counts[c]);
  }

  KMeansResult r;
  r.labels = std::move(labels);
  r.inertia = 0.0;
  for (int i = 0; i < n; ++i)
    r.inertia += (rows.row(i) - centers.row(r.labels[i])).squaredNorm();
  return r;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& rows, int k, uint64_t seed,
                    int restarts, int max_iters) {
  if (k < 1 || k > rows.rows())
    throw std::invalid_argument("kmeans: k out of range");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    core::Rng rng = core::derive_stream(seed, "kmeans", uint64_t(r));
    KMeansResult res = run_once(rows, k, rng, max_iters);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

}  // namespace avsim::behavior
