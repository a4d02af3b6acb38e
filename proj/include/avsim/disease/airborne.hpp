#pragma once

#include <span>
#include <vector>

#include "avsim/core/rng.hpp"

namespace avsim::disease {

// Per-agent immunity parameters entering the airborne infection probability
//   rho = S_age * k * (1 - alpha_vacc*gamma_vacc - alpha_hyg*gamma_hyg).
struct AgentImmunity {
  double s_age = 1.0;
  double alpha_vacc = 1.0;
  double gamma_vacc = 0.0;
  double alpha_hyg = 0.0;
  double gamma_hyg = 0.0;
  double k = 0.3;
};

// Throws when a field is outside its range or the combined protection weight
// exceeds 1 (which would drive rho negative).
void validate_immunity(const AgentImmunity& im);

double infection_prob(const AgentImmunity& receiver);

// One occupant of a location or vehicle during a contact-detection tick.
struct ContactCandidate {
  int agent_id = -1;
  bool infectious = false;
  bool susceptible = false;
};

struct ContactPair {
  int transmitter = -1;
  int receiver = -1;
  double distance_m = 0.0;
};

// Scatters the occupants uniformly over a w x h footprint (positions drawn
// from `rng` in input order) and reports every infectious->susceptible pair
// within `radius_m`, sorted by (transmitter, receiver).
std::vector<ContactPair> detect_contacts(std::span<const ContactCandidate> occupants,
                                         double footprint_w_m, double footprint_h_m,
                                         double radius_m, core::Rng& rng);

}  // namespace avsim::disease
