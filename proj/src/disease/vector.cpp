#include "avsim/disease/vector.hpp"

#include <cmath>

namespace avsim::disease {

double vector_birth(double n_v, double capacity, const VectorParams& p) {
  if (n_v <= 0.0) return 0.0;
  return n_v * (p.psi_v - (p.psi_v - p.mu_v) * n_v / capacity);
}

Bites total_bites(double n_v, double n_h, const VectorParams& p) {
  Bites b;
  double sv = p.sigma_v * n_v;
  double sh = p.sigma_h * n_h;
  if (sv + sh <= 0.0) return b;  // empty patch: defined limit of 0
  b.total = sv * sh / (sv + sh);
  b.per_vector = n_v > 0.0 ? b.total / n_v : 0.0;
  b.per_human = n_h > 0.0 ? b.total / n_h : 0.0;
  return b;
}

double vector_force(double bites_per_vector, double infectious_humans,
                    double total_humans, double beta_vh) {
  if (total_humans <= 0.0) return 0.0;
  return bites_per_vector * beta_vh * (infectious_humans / total_humans);
}

double human_force(double bites_per_human, double infectious_vectors,
                   double total_vectors, double beta_hv) {
  if (total_vectors <= 0.0) return 0.0;
  return bites_per_human * beta_hv * (infectious_vectors / total_vectors);
}

double infection_probability(double lambda, double dt) {
  return 1.0 - std::exp(-lambda * dt);
}

double incubation_days(double temperature_c, core::Rng& rng,
                       bool* above_hottest_band) {
  if (above_hottest_band) *above_hottest_band = false;
  if (temperature_c < 21.0) return rng.uniform(10.0, 25.0);
  if (temperature_c < 26.0) return rng.uniform(7.0, 10.0);
  if (temperature_c < 31.0) return rng.uniform(4.0, 7.0);
  if (above_hottest_band) *above_hottest_band = true;
  return rng.uniform(4.0, 7.0);  // no published band this hot; hold the last
}

bool step_patch(PatchState& patch, double capacity, const VectorParams& p,
                double infectious_humans, double total_humans, double dt_days) {
  double n_v = patch.n_v();
  Bites bites = total_bites(n_v, total_humans, p);
  double lambda_v =
      vector_force(bites.per_vector, infectious_humans, total_humans, p.beta_vh);
  double h = vector_birth(n_v, capacity, p);

  double ds = h - lambda_v * patch.s_v - p.mu_v * patch.s_v;
  double de = lambda_v * patch.s_v - patch.nu_v * patch.e_v - p.mu_v * patch.e_v;
  double di = patch.nu_v * patch.e_v - p.mu_v * patch.i_v;

  patch.s_v += ds * dt_days;
  patch.e_v += de * dt_days;
  patch.i_v += di * dt_days;

  bool clamped = false;
  for (double* v : {&patch.s_v, &patch.e_v, &patch.i_v}) {
    if (*v < 0.0) {
      *v = 0.0;
      clamped = true;
    }
  }
  return clamped;
}

}  // namespace avsim::disease
