#include "avsim/sim/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "avsim/core/time.hpp"
#include "avsim/disease/progression.hpp"

namespace avsim::sim {

namespace {

std::string join_path(const std::string& base, const std::string& rel) {
  if (rel.empty() || rel.front() == '/' || base.empty()) return rel;
  return base + "/" + rel;
}

std::vector<ScheduleEntry> parse_schedule(const nlohmann::json& j) {
  std::vector<ScheduleEntry> out;
  for (const auto& e : j) {
    ScheduleEntry s;
    s.at = e.at("at").get<std::string>();
    s.until = e.at("until").get<int>();
    s.jitter_min = e.value("jitter_min", 0);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

Scenario Scenario::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? "" : path.substr(0, slash);
  return from_json_text(ss.str(), base);
}

Scenario Scenario::from_json_text(const std::string& text,
                                  const std::string& base_dir) {
  nlohmann::json j = nlohmann::json::parse(text);
  Scenario s;
  s.name = j.value("name", "scenario");
  s.seed = j.value("seed", uint64_t(1));
  s.duration_days = j.at("duration_days").get<int>();
  std::string kind = j.value("disease_kind", "airborne");
  if (kind == "airborne")
    s.kind = DiseaseKind::airborne;
  else if (kind == "vectorborne")
    s.kind = DiseaseKind::vectorborne;
  else
    throw std::runtime_error("scenario: unknown disease_kind '" + kind + "'");

  s.environment_path = join_path(base_dir, j.at("environment").get<std::string>());
  s.progression_path = join_path(base_dir, j.at("progression").get<std::string>());

  const auto& pop = j.at("population");
  s.population_size = pop.at("size").get<int>();
  s.household_size = pop.value("household_size", 4);
  for (const auto& cj : pop.at("classes")) {
    ClassSpec c;
    c.name = cj.at("name").get<std::string>();
    c.fraction = cj.at("fraction").get<double>();
    if (cj.contains("age_range")) {
      c.age_min = cj["age_range"].at(0).get<int>();
      c.age_max = cj["age_range"].at(1).get<int>();
    }
    c.home_zone_class = cj.value("home_zone_class", "residential");
    c.work_zone_class = cj.value("work_zone_class", "");
    for (const auto& sj : cj.at("subclasses")) {
      SubclassSpec sub;
      sub.name = sj.at("name").get<std::string>();
      sub.fraction = sj.value("fraction", 1.0);
      if (sj.contains("matrices")) {
        const auto& m = sj["matrices"];
        sub.weekday_matrices = join_path(base_dir, m.at("weekday").get<std::string>());
        sub.weekend_matrices = join_path(base_dir, m.at("weekend").get<std::string>());
      }
      if (sj.contains("schedule")) {
        const auto& sc = sj["schedule"];
        sub.weekday_schedule = parse_schedule(sc.at("weekday"));
        sub.weekend_schedule = parse_schedule(sc.at("weekend"));
        sub.schedule_sample_days = sc.value("sample_days", 60);
      }
      c.subclasses.push_back(std::move(sub));
    }
    s.classes.push_back(std::move(c));
  }
  if (pop.contains("immunity")) {
    const auto& im = pop["immunity"];
    s.immunity.k = im.value("k", 0.3);
    s.immunity.alpha_vacc = im.value("alpha_vacc", 1.0);
    s.immunity.gamma_vacc = im.value("gamma_vacc", 0.0);
    s.immunity.alpha_hyg = im.value("alpha_hyg", 0.0);
    s.immunity.gamma_hyg = im.value("gamma_hyg", 0.0);
  }

  if (j.contains("location_roles"))
    for (const auto& [label, role] : j["location_roles"].items())
      s.location_roles[label] = role.get<std::string>();

  if (j.contains("interventions")) {
    const auto& iv = j["interventions"];
    if (iv.contains("pcr")) {
      const auto& p = iv["pcr"];
      s.pcr.enabled = p.value("enabled", true);
      s.pcr.cadence_days = p.value("cadence_days", 1);
      s.pcr.symptomatic_test_prob = p.value("symptomatic_test_prob", 1.0);
      s.pcr.screening_fraction = p.value("screening_fraction", 0.0);
      s.pcr.sensitivity = p.value("sensitivity", 1.0);
      s.pcr.specificity = p.value("specificity", 1.0);
      s.pcr.trace_window_days = p.value("trace_window_days", 5);
      s.pcr.quarantine_days = p.value("quarantine_days", 14);
    }
    if (iv.contains("vaccination")) {
      for (const auto& v : iv["vaccination"]) {
        VaccinationEvent e;
        e.day = v.value("day", -1);
        e.trigger_infected_pct = v.value("trigger_infected_pct", -1.0);
        if (v.contains("zones"))
          e.zones = v["zones"].get<std::vector<std::string>>();
        if (v.contains("classes"))
          e.classes = v["classes"].get<std::vector<std::string>>();
        e.boost = v.at("boost").get<double>();
        s.vaccinations.push_back(std::move(e));
      }
    }
    if (iv.contains("vector_control")) {
      const auto& v = iv["vector_control"];
      s.vector_control.enabled = v.value("enabled", true);
      s.vector_control.period_days = v.value("period_days", 7);
      s.vector_control.exposed_threshold = v.value("exposed_threshold", 2.0);
      s.vector_control.reduction_pct = v.value("reduction_pct", 75.0);
    }
  }

  if (j.contains("seeding")) {
    const auto& sd = j["seeding"];
    if (sd.contains("airborne")) {
      const auto& a = sd["airborne"];
      s.airborne_seed.agent_class = a.value("class", "");
      s.airborne_seed.count = a.value("count", 0);
      s.airborne_seed.state = a.value("state", "InfectiousMild");
    }
    if (sd.contains("vector")) {
      const auto& v = sd["vector"];
      s.vector_seed.residential_zone = v.value("residential_zone", "");
      s.vector_seed.exposed_homes = v.value("exposed_homes", 6);
      s.vector_seed.agents_per_home = v.value("agents_per_home", 5);
      s.vector_seed.infected_vectors_max = v.value("infected_vectors_max", 20.0);
      s.vector_seed.initial_fill = v.value("initial_fill", 0.9);
    }
  }

  if (j.contains("vector_params")) {
    const auto& v = j["vector_params"];
    s.vector_params.psi_v = v.value("psi_v", 0.3);
    s.vector_params.mu_v = v.value("mu_v", 1.0 / 14.0);
    s.vector_params.sigma_v = v.value("sigma_v", 0.5);
    s.vector_params.sigma_h = v.value("sigma_h", 10.0);
    s.vector_params.beta_vh = v.value("beta_vh", 0.33);
    s.vector_params.beta_hv = v.value("beta_hv", 0.33);
  }

  s.contact_radius_m = j.value("contact_radius_m", 1.0);
  if (j.contains("footprints_m"))
    for (const auto& [cls, wh] : j["footprints_m"].items())
      s.footprints[cls] = Footprint{wh.at(0).get<double>(), wh.at(1).get<double>()};
  s.disease_update_min = j.value("disease_update_min", 5);
  s.public_preference = j.value("public_preference", 0.5);
  s.taxi_fallback = j.value("taxi_fallback", true);
  if (j.contains("output")) {
    const auto& o = j["output"];
    s.log_contacts = o.value("contacts_in_events", false);
    s.write_agents = o.value("agents_jsonl", true);
  }
  if (j.contains("patch_temperature_c") && !j["patch_temperature_c"].is_null())
    s.patch_temperature_override = j["patch_temperature_c"].get<double>();
  if (j.contains("holidays"))
    for (const auto& d : j["holidays"]) s.holidays.insert(d.get<int>());
  s.threads = j.value("threads", 1);

  s.validate();
  return s;
}

Footprint Scenario::footprint_for(const std::string& zone_class) const {
  auto it = footprints.find(zone_class);
  if (it != footprints.end()) return it->second;
  it = footprints.find("default");
  if (it != footprints.end()) return it->second;
  return Footprint{};
}

Footprint Scenario::vehicle_footprint() const {
  auto it = footprints.find("vehicle");
  if (it != footprints.end()) return it->second;
  return Footprint{10.0, 3.0};
}

bool Scenario::is_weekend(int day) const {
  return core::is_weekend_day(day) || holidays.count(day) > 0;
}

void Scenario::validate() const {
  if (population_size < 1)
    throw std::runtime_error("scenario: population must be >= 1");
  if (duration_days < 1)
    throw std::runtime_error("scenario: duration must be >= 1 day");
  if (household_size < 1)
    throw std::runtime_error("scenario: household_size must be >= 1");
  if (classes.empty()) throw std::runtime_error("scenario: no classes");
  double total = 0.0;
  for (const auto& c : classes) {
    total += c.fraction;
    if (c.age_min > c.age_max)
      throw std::runtime_error("scenario: bad age range for class " + c.name);
    if (c.subclasses.empty())
      throw std::runtime_error("scenario: class " + c.name + " has no subclasses");
    double sub_total = 0.0;
    for (const auto& sub : c.subclasses) {
      sub_total += sub.fraction;
      bool has_files = !sub.weekday_matrices.empty() && !sub.weekend_matrices.empty();
      bool has_schedule =
          !sub.weekday_schedule.empty() && !sub.weekend_schedule.empty();
      if (!has_files && !has_schedule)
        throw std::runtime_error("scenario: subclass " + c.name + "/" + sub.name +
                                 " needs matrices or a schedule");
    }
    if (std::abs(sub_total - 1.0) > 1e-6)
      throw std::runtime_error("scenario: subclass fractions of " + c.name +
                               " sum to " + std::to_string(sub_total));
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw std::runtime_error("scenario: class fractions sum to " +
                             std::to_string(total));
  double protection = immunity.alpha_vacc * immunity.gamma_vacc +
                      immunity.alpha_hyg * immunity.gamma_hyg;
  if (protection > 1.0 + 1e-12)
    throw std::runtime_error("scenario: combined immunity protection exceeds 1");
  for (const auto& v : vaccinations) {
    if (v.boost <= 0.0 || v.boost > 1.0)
      throw std::runtime_error("scenario: vaccination boost must lie in (0,1]");
    if (v.day < 0 && v.trigger_infected_pct < 0)
      throw std::runtime_error("scenario: vaccination needs a day or a trigger");
  }
  if (disease_update_min < 1 || core::kMinutesPerDay % disease_update_min != 0)
    throw std::runtime_error("scenario: disease_update_min must divide 1440");
  // Must parse cleanly so load fails fast on a typo.
  disease::state_from_name(airborne_seed.state);
}

}  // namespace avsim::sim
