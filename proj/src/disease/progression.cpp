#include "avsim/disease/progression.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace avsim::disease {

namespace {
constexpr const char* kNames[kStateCount] = {
    "Susceptible",        "Exposed",          "InfectiousAsymptomatic",
    "InfectiousMild",     "InfectiousSevere", "InfectiousCritical",
    "Recovered",          "Dead",
};
}  // namespace

const char* state_name(State s) { return kNames[size_t(s)]; }

State state_from_name(const std::string& name) {
  for (int i = 0; i < kStateCount; ++i)
    if (name == kNames[i]) return State(i);
  throw std::invalid_argument("unknown disease state '" + name + "'");
}

ProgressionTable ProgressionTable::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open progression table: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

ProgressionTable ProgressionTable::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ProgressionTable t;
  t.disease = j.value("disease", "disease");
  t.age_band_edges = j.at("age_band_edges").get<std::vector<int>>();
  t.susceptibility_by_band = j.at("susceptibility").get<std::vector<double>>();
  if (j.contains("hospitalization")) {
    const auto& h = j["hospitalization"];
    t.hospitalization.prob_mild = h.value("mild", 0.0);
    t.hospitalization.prob_severe = h.value("severe", 0.0);
    t.hospitalization.prob_critical = h.value("critical", 0.0);
  }
  const size_t bands = t.age_band_edges.size();
  for (const auto& [from_name, branches] : j.at("transitions").items()) {
    State from = state_from_name(from_name);
    for (const auto& bj : branches) {
      TransitionBranch br;
      br.to = state_from_name(bj.at("to").get<std::string>());
      const auto& pj = bj.at("prob");
      if (pj.is_array())
        br.prob_by_band = pj.get<std::vector<double>>();
      else
        br.prob_by_band.assign(bands, pj.get<double>());
      const auto& dj = bj.at("duration_days");
      br.median_days = dj.at("median").get<double>();
      br.sigma_log = dj.at("sigma_log").get<double>();
      t.transitions[from].push_back(std::move(br));
    }
  }
  t.validate();
  return t;
}

void ProgressionTable::validate() const {
  if (age_band_edges.empty())
    throw std::runtime_error("progression table: no age bands");
  for (size_t i = 1; i < age_band_edges.size(); ++i)
    if (age_band_edges[i] <= age_band_edges[i - 1])
      throw std::runtime_error("progression table: age band edges must increase");
  if (susceptibility_by_band.size() != age_band_edges.size())
    throw std::runtime_error("progression table: susceptibility size mismatch");
  for (double s : susceptibility_by_band)
    if (s < 0.0 || s > 1.0)
      throw std::runtime_error("progression table: susceptibility outside [0,1]");
  constexpr double kTol = 1e-9;
  for (const auto& [from, branches] : transitions) {
    if (is_absorbing(from))
      throw std::runtime_error(std::string("progression table: state '") +
                               state_name(from) + "' cannot have transitions");
    if (branches.empty())
      throw std::runtime_error("progression table: empty branch list");
    for (size_t band = 0; band < age_band_edges.size(); ++band) {
      double sum = 0.0;
      for (const auto& br : branches) {
        if (br.prob_by_band.size() != age_band_edges.size())
          throw std::runtime_error("progression table: branch probability size mismatch");
        if (br.sigma_log <= 0.0 || br.median_days <= 0.0)
          throw std::runtime_error("progression table: non-positive duration parameters");
        sum += br.prob_by_band[band];
      }
      if (std::abs(sum - 1.0) > kTol)
        throw std::runtime_error(
            std::string("progression table: branches from '") + state_name(from) +
            "' sum to " + std::to_string(sum) + " in band " + std::to_string(band));
    }
  }
}

int ProgressionTable::band_of_age(int age) const {
  int band = 0;
  for (size_t i = 0; i < age_band_edges.size(); ++i)
    if (age >= age_band_edges[i]) band = int(i);
  return band;
}

double ProgressionTable::age_susceptibility(int age) const {
  return susceptibility_by_band[size_t(band_of_age(age))];
}

bool ProgressionTable::edge_allowed(State from, State to) const {
  auto it = transitions.find(from);
  if (it == transitions.end()) return false;
  for (const auto& br : it->second)
    if (br.to == to) return true;
  return false;
}

SampledTransition sample_transition(State state, int age,
                                    const ProgressionTable& table,
                                    core::Rng& rng) {
  if (is_absorbing(state))
    throw std::logic_error(std::string("sample_transition: '") +
                           state_name(state) + "' is absorbing");
  auto it = table.transitions.find(state);
  if (it == table.transitions.end())
    throw std::logic_error(std::string("sample_transition: no branches for '") +
                           state_name(state) + "'");
  const auto& branches = it->second;
  int band = table.band_of_age(age);

  double x = rng.next_double();
  double acc = 0.0;
  const TransitionBranch* chosen = &branches.back();
  for (const auto& br : branches) {
    acc += br.prob_by_band[size_t(band)];
    if (x < acc) {
      chosen = &br;
      break;
    }
  }
  SampledTransition out;
  out.next = chosen->to;
  out.duration_days = rng.lognormal_median(chosen->median_days, chosen->sigma_log);
  out.duration_minutes =
      std::max<int64_t>(1, int64_t(std::ceil(out.duration_days * 1440.0)));
  return out;
}

}  // namespace avsim::disease
