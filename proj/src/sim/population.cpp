#include "avsim/sim/population.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "avsim/core/rng.hpp"

namespace avsim::sim {

std::vector<int> apportion(int total, std::span<const double> fractions) {
  const size_t n = fractions.size();
  std::vector<int> counts(n, 0);
  std::vector<std::pair<double, size_t>> remainders(n);
  int assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    double quota = double(total) * fractions[i];
    counts[i] = int(quota);
    assigned += counts[i];
    remainders[i] = {quota - double(counts[i]), i};
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int left = total - assigned, i = 0; left > 0; --left, ++i)
    ++counts[remainders[size_t(i % int(n))].second];
  return counts;
}

std::vector<Agent> generate_population(const Scenario& scenario,
                                       const env::Environment& environment,
                                       const disease::ProgressionTable& table) {
  // Apportion classes, then subclasses within each class.
  std::vector<double> class_fractions;
  for (const auto& c : scenario.classes) class_fractions.push_back(c.fraction);
  std::vector<int> class_counts = apportion(scenario.population_size, class_fractions);

  std::vector<std::pair<int, int>> mix;  // (class, subclass) per agent slot
  mix.reserve(size_t(scenario.population_size));
  for (size_t ci = 0; ci < scenario.classes.size(); ++ci) {
    std::vector<double> sub_fractions;
    for (const auto& s : scenario.classes[ci].subclasses)
      sub_fractions.push_back(s.fraction);
    std::vector<int> sub_counts = apportion(class_counts[ci], sub_fractions);
    for (size_t si = 0; si < sub_counts.size(); ++si)
      for (int k = 0; k < sub_counts[si]; ++k) mix.emplace_back(int(ci), int(si));
  }

  // Shuffle the slot list so households mix classes.
  core::Rng shuffle_rng = core::derive_stream(scenario.seed, "classmix");
  for (size_t i = mix.size(); i > 1; --i)
    std::swap(mix[i - 1], mix[size_t(shuffle_rng.below(i))]);

  std::vector<Agent> agents(mix.size());
  for (size_t i = 0; i < mix.size(); ++i) {
    Agent& a = agents[i];
    a.id = int(i);
    a.class_index = mix[i].first;
    a.subclass_index = mix[i].second;
    const ClassSpec& cls = scenario.classes[size_t(a.class_index)];

    core::Rng age_rng = core::derive_stream(scenario.seed, "age", uint64_t(i));
    a.age = cls.age_min +
            int(age_rng.below(uint64_t(cls.age_max - cls.age_min + 1)));

    const auto& homes = environment.locations_of_class(cls.home_zone_class);
    if (homes.empty())
      throw std::runtime_error("population: no locations of zone class '" +
                               cls.home_zone_class + "' for class " + cls.name);
    uint64_t household = uint64_t(i) / uint64_t(scenario.household_size);
    core::Rng home_rng = core::derive_stream(scenario.seed, "home", household,
                                             core::hash_str(cls.home_zone_class));
    a.home = homes[size_t(home_rng.below(homes.size()))];

    if (cls.work_zone_class.empty()) {
      a.work = a.home;
    } else {
      const auto& works = environment.locations_of_class(cls.work_zone_class);
      if (works.empty())
        throw std::runtime_error("population: no locations of zone class '" +
                                 cls.work_zone_class + "' for class " + cls.name);
      core::Rng work_rng = core::derive_stream(scenario.seed, "work", uint64_t(i));
      a.work = works[size_t(work_rng.below(works.size()))];
    }

    a.immunity.k = scenario.immunity.k;
    a.immunity.alpha_vacc = scenario.immunity.alpha_vacc;
    a.immunity.gamma_vacc = scenario.immunity.gamma_vacc;
    a.immunity.alpha_hyg = scenario.immunity.alpha_hyg;
    a.immunity.gamma_hyg = scenario.immunity.gamma_hyg;
    a.immunity.s_age = table.age_susceptibility(a.age);
    disease::validate_immunity(a.immunity);
  }
  return agents;
}

}  // namespace avsim::sim
