#pragma once

#include "avsim/core/rng.hpp"

namespace avsim::disease {

// Vector (mosquito) population parameters. All rates are per day.
struct VectorParams {
  double psi_v = 0.3;        // natural emergence rate
  double mu_v = 1.0 / 14.0;  // death rate
  double sigma_v = 0.5;      // max bites per vector
  double sigma_h = 10.0;     // bites a human can tolerate
  double beta_vh = 0.33;     // human -> vector transmission probability
  double beta_hv = 0.33;     // vector -> human transmission probability
};

// Logistic-style total birth rate h_v = N_v (psi_v - (psi_v - mu_v) N_v / K_v).
double vector_birth(double n_v, double capacity, const VectorParams& p);

struct Bites {
  double total = 0.0;       // b^k
  double per_vector = 0.0;  // b_v^k
  double per_human = 0.0;   // b_h^k
};

// Harmonic biting rate: b = sigma_v N_v sigma_h N_h / (sigma_v N_v + sigma_h N_h).
Bites total_bites(double n_v, double n_h, const VectorParams& p);

// Force of infection on vectors: lambda_v = b_v * beta_vh * I_h / N_h.
double vector_force(double bites_per_vector, double infectious_humans,
                    double total_humans, double beta_vh);

// Force of infection on humans in a patch: lambda_h = b_h * beta_hv * I_v / N_v.
double human_force(double bites_per_human, double infectious_vectors,
                   double total_vectors, double beta_hv);

// p = 1 - exp(-lambda * dt); lambda and dt in consistent units.
double infection_probability(double lambda, double dt);

// Incubation time in days drawn by temperature band; temperatures at or above
// the hottest band reuse it and set *above_hottest_band.
double incubation_days(double temperature_c, core::Rng& rng,
                       bool* above_hottest_band = nullptr);

struct PatchState {
  double s_v = 0.0;
  double e_v = 0.0;
  double i_v = 0.0;
  double nu_v = 0.0;  // exposed -> infectious rate per day, redrawn daily

  double n_v() const { return s_v + e_v + i_v; }
};

// One forward-Euler step of the patch SEI system over dt_days, holding the
// human occupancy snapshot fixed. Negative intermediate values are clamped to
// zero; returns true when clamping happened.
bool step_patch(PatchState& patch, double capacity, const VectorParams& p,
                double infectious_humans, double total_humans, double dt_days);

}  // namespace avsim::disease
