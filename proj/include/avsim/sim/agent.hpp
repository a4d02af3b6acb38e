#pragma once

#include <cstdint>

#include "avsim/disease/airborne.hpp"
#include "avsim/disease/progression.hpp"
#include "avsim/env/tree.hpp"

namespace avsim::sim {

struct Agent {
  int id = -1;
  int class_index = 0;
  int subclass_index = 0;
  int age = 0;
  env::NodeId home = env::kNoNode;
  env::NodeId work = env::kNoNode;
  disease::AgentImmunity immunity;

  // Markov chain position; the next hop is sampled on entry.
  disease::State state = disease::State::Susceptible;
  disease::State pending_next = disease::State::Recovered;
  int64_t state_entered_min = 0;
  int64_t state_exit_min = -1;  // -1: no scheduled exit
  int transition_ordinal = 0;   // keys the per-agent progression stream

  // Care overlays.
  bool hospitalized = false;
  int64_t quarantine_until_day = -1;

  bool alive() const { return state != disease::State::Dead; }
  bool in_quarantine(int day) const { return quarantine_until_day > day; }
};

}  // namespace avsim::sim
