#include "avsim/disease/airborne.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avsim::disease {

void validate_immunity(const AgentImmunity& im) {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(im.s_age) || !in01(im.alpha_vacc) || !in01(im.gamma_vacc) ||
      !in01(im.alpha_hyg) || !in01(im.gamma_hyg))
    throw std::domain_error("immunity: weights must lie in [0,1]");
  if (im.k <= 0.0) throw std::domain_error("immunity: k must be positive");
  if (im.alpha_vacc * im.gamma_vacc + im.alpha_hyg * im.gamma_hyg > 1.0 + 1e-12)
    throw std::domain_error("immunity: combined protection exceeds 1");
}

double infection_prob(const AgentImmunity& r) {
  double rho = r.s_age * r.k *
               (1.0 - r.alpha_vacc * r.gamma_vacc - r.alpha_hyg * r.gamma_hyg);
  return std::max(0.0, rho);
}

std::vector<ContactPair> detect_contacts(std::span<const ContactCandidate> occupants,
                                         double footprint_w_m, double footprint_h_m,
                                         double radius_m, core::Rng& rng) {
  std::vector<ContactPair> out;
  const size_t n = occupants.size();
  if (n < 2) return out;

  struct Pos {
    double x, y;
  };
  std::vector<Pos> pos(n);
  for (size_t i = 0; i < n; ++i)
    pos[i] = {rng.next_double() * footprint_w_m, rng.next_double() * footprint_h_m};

  // Bucket by radius-sized cells; candidates only come from the 3x3 block.
  const double inv = 1.0 / radius_m;
  const int cols = std::max(1, int(std::ceil(footprint_w_m * inv)));
  const int rows = std::max(1, int(std::ceil(footprint_h_m * inv)));
  std::vector<std::vector<int>> cells(size_t(cols) * size_t(rows));
  auto cell_of = [&](const Pos& p) {
    int cx = std::min(cols - 1, int(p.x * inv));
    int cy = std::min(rows - 1, int(p.y * inv));
    return size_t(cy) * size_t(cols) + size_t(cx);
  };
  for (size_t i = 0; i < n; ++i) cells[cell_of(pos[i])].push_back(int(i));

  const double r2 = radius_m * radius_m;
  for (size_t i = 0; i < n; ++i) {
    if (!occupants[i].infectious) continue;
    int cx = std::min(cols - 1, int(pos[i].x * inv));
    int cy = std::min(rows - 1, int(pos[i].y * inv));
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        int nx = cx + dx, ny = cy + dy;
        if (nx < 0 || nx >= cols || ny < 0 || ny >= rows) continue;
        for (int j : cells[size_t(ny) * size_t(cols) + size_t(nx)]) {
          if (!occupants[size_t(j)].susceptible) continue;
          double ddx = pos[i].x - pos[size_t(j)].x;
          double ddy = pos[i].y - pos[size_t(j)].y;
          double d2 = ddx * ddx + ddy * ddy;
          if (d2 <= r2)
            out.push_back({occupants[i].agent_id, occupants[size_t(j)].agent_id,
                           std::sqrt(d2)});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ContactPair& a, const ContactPair& b) {
    return a.transmitter != b.transmitter ? a.transmitter < b.transmitter
                                          : a.receiver < b.receiver;
  });
  return out;
}

}  // namespace avsim::disease
