#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avsim/core/rng.hpp"

namespace avsim::disease {

// Markov disease states. Hospitalization and quarantine are care overlays
// tracked on the agent, not chain states; outputs report hospitalized agents
// as their own category.
enum class State : uint8_t {
  Susceptible,
  Exposed,
  InfectiousAsymptomatic,
  InfectiousMild,
  InfectiousSevere,
  InfectiousCritical,
  Recovered,
  Dead,
};
inline constexpr int kStateCount = 8;

const char* state_name(State s);
State state_from_name(const std::string& name);

inline bool is_infectious(State s) {
  return s == State::InfectiousAsymptomatic || s == State::InfectiousMild ||
         s == State::InfectiousSevere || s == State::InfectiousCritical;
}
inline bool is_symptomatic(State s) {
  return s == State::InfectiousMild || s == State::InfectiousSevere ||
         s == State::InfectiousCritical;
}
inline bool is_absorbing(State s) {
  return s == State::Recovered || s == State::Dead || s == State::Susceptible;
}

struct TransitionBranch {
  State to = State::Recovered;
  std::vector<double> prob_by_band;  // one entry per age band
  double median_days = 1.0;          // log-normal median of the stay in the
  double sigma_log = 0.5;            // current state before moving to `to`
};

struct HospitalizationPolicy {
  double prob_mild = 0.0;
  double prob_severe = 0.0;
  double prob_critical = 0.0;

  double prob_for(State s) const {
    switch (s) {
      case State::InfectiousMild: return prob_mild;
      case State::InfectiousSevere: return prob_severe;
      case State::InfectiousCritical: return prob_critical;
      default: return 0.0;
    }
  }
};

// Disease parameter file: age bands, age susceptibility, branch probabilities
// and log-normal stay times per transition. Shipped tables are illustrative;
// published tables load through the same schema.
struct ProgressionTable {
  std::string disease;
  std::vector<int> age_band_edges;  // ascending; last band is open-ended
  std::vector<double> susceptibility_by_band;
  std::map<State, std::vector<TransitionBranch>> transitions;
  HospitalizationPolicy hospitalization;

  static ProgressionTable from_json_file(const std::string& path);
  static ProgressionTable from_json_text(const std::string& text);
  void validate() const;

  int band_of_age(int age) const;
  double age_susceptibility(int age) const;
  bool edge_allowed(State from, State to) const;
};

struct SampledTransition {
  State next = State::Recovered;
  double duration_days = 0.0;
  int64_t duration_minutes = 1;  // ceil(days * 1440), at least 1
};

// Draws the branch and the log-normal stay time for a non-absorbing state.
SampledTransition sample_transition(State state, int age,
                                    const ProgressionTable& table,
                                    core::Rng& rng);

}  // namespace avsim::disease
