#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "avsim/behavior/spectral.hpp"
#include "avsim/core/text.hpp"
#include "avsim/core/time.hpp"
#include "avsim/mobility/labeling.hpp"
#include "avsim/sim/engine.hpp"
#include "avsim/sim/synth.hpp"
#include "avsim/trajectory/matrices.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

using avsim::core::is_weekend_day;

std::map<std::string, std::string> read_participants_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open participants file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    auto t = avsim::core::trim(line);
    if (t.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto cols = avsim::core::split(t, ',');
    if (cols.size() != 2)
      throw std::runtime_error("participants file: expected 2 columns");
    out[std::string(avsim::core::trim(cols[0]))] =
        std::string(avsim::core::trim(cols[1]));
  }
  return out;
}

void write_gazetteer_json(const std::string& path,
                          const avsim::mobility::Gazetteer& g) {
  nlohmann::ordered_json j;
  j["nearest_cutoff_m"] = g.nearest_cutoff_m;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : g.entries) {
    nlohmann::ordered_json ej;
    ej["participant"] = e.participant;
    ej["zone"] = e.zone;
    ej["label"] = e.label;
    ej["lat"] = e.lat;
    ej["lon"] = e.lon;
    ej["radius_m"] = e.radius_m;
    j["entries"].push_back(ej);
  }
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

int cmd_synth(const std::string& profiles_path, const std::string& out_dir,
              uint64_t seed, int participants) {
  avsim::sim::SynthSpec spec = profiles_path.empty()
                                   ? avsim::sim::two_shift_spec(participants)
                                   : avsim::sim::SynthSpec::from_json_file(profiles_path);
  avsim::sim::SynthOutput out = avsim::sim::synth_gps(spec, seed);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir + "/traces.csv");
    avsim::mobility::write_gps_csv(f, out.points);
  }
  write_gazetteer_json(out_dir + "/gazetteer.json", out.gazetteer);
  {
    std::ofstream f(out_dir + "/truth.csv");
    f << "participant_id,profile\n";
    for (const auto& [pid, profile] : out.truth) f << pid << ',' << profile << "\n";
  }
  std::cout << "synth: " << out.points.size() << " samples, "
            << out.truth.size() << " participants -> " << out_dir << "\n";
  return 0;
}

int cmd_mobility(const std::string& traces_path, const std::string& gazetteer_path,
                 const std::string& out_path, double eps, int min_pts,
                 const std::string& regions_path) {
  std::ifstream tf(traces_path);
  if (!tf) throw std::runtime_error("cannot open traces: " + traces_path);
  auto points = avsim::mobility::read_gps_csv(tf);
  auto gaz = avsim::mobility::Gazetteer::from_json_file(gazetteer_path);
  avsim::mobility::MobilityParams params;
  params.eps_m = eps;
  params.min_pts = min_pts;
  auto result = avsim::mobility::process_traces(points, gaz, params);
  {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    avsim::mobility::write_time_location_csv(f, result.records);
  }
  if (!regions_path.empty()) {
    std::ofstream f(regions_path);
    f << "region_id,participant_id,centroid_lat,centroid_lon,points,zone,label\n";
    for (const auto& r : result.regions)
      f << r.region_id << ',' << r.participant << ','
        << avsim::core::fmt_fixed(r.centroid_lat, 7) << ','
        << avsim::core::fmt_fixed(r.centroid_lon, 7) << ','
        << r.member_points.size() << ',' << r.zone << ',' << r.label << "\n";
  }
  for (const auto& d : result.diagnostics) std::cerr << "mobility: " << d << "\n";
  std::cout << "mobility: " << result.records.size() << " records, "
            << result.regions.size() << " stay regions -> " << out_path << "\n";
  return 0;
}

int cmd_cluster(const std::string& input, const std::string& participants_path,
                const std::string& out_path, const std::string& report_path,
                int threads, uint64_t seed) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open time-location csv: " + input);
  auto records = avsim::mobility::read_time_location_csv(in);
  auto days = avsim::behavior::day_vectors_from_records(records);

  std::map<std::string, std::string> occupation;
  if (!participants_path.empty()) occupation = read_participants_csv(participants_path);
  auto class_of = [&](const std::string& pid) {
    auto it = occupation.find(pid);
    return it == occupation.end() ? std::string("all") : it->second;
  };

  std::map<std::string, std::vector<avsim::behavior::DayVector>> by_class;
  for (auto& dv : days) by_class[class_of(dv.participant)].push_back(dv);

  nlohmann::ordered_json report;
  std::map<std::pair<std::string, int>, int> label_of;
  for (auto& [cls, class_days] : by_class) {
    auto grid = avsim::behavior::default_sigma_grid(class_days);
    auto sweep = avsim::behavior::sigma_sweep(class_days, grid,
                                              avsim::behavior::default_modes(),
                                              1.0, threads);
    auto mode = avsim::behavior::select_mode(sweep);
    auto clusters = avsim::behavior::spectral_cluster(class_days, mode.cluster_count,
                                                      mode.sigma, 1.0, seed);
    for (size_t i = 0; i < class_days.size(); ++i)
      label_of[{class_days[i].participant, class_days[i].day_index}] =
          clusters.labels[i];

    avsim::behavior::SpectralParams p{mode.sigma, 1.0};
    Eigen::MatrixXd l = avsim::behavior::build_laplacian(
        avsim::behavior::build_adjacency(class_days, p));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
    nlohmann::ordered_json cj;
    cj["days"] = class_days.size();
    cj["prominent_mode"] = {mode.mode.first, mode.mode.second};
    cj["clusters"] = mode.cluster_count;
    cj["sigma"] = mode.sigma;
    cj["gap"] = mode.gap;
    cj["degenerate_widened"] = clusters.degenerate_widened;
    std::vector<double> evs(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + solver.eigenvalues().size());
    cj["eigenvalues"] = evs;
    for (const auto& d : sweep.diagnostics) std::cerr << "cluster: " << d << "\n";
    report[cls] = cj;
  }

  {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << "participant_id,day,cluster_label\n";
    for (const auto& [key, label] : label_of)
      f << key.first << ',' << key.second << ',' << label << "\n";
  }
  if (!report_path.empty()) {
    std::ofstream f(report_path);
    f << report.dump(2) << "\n";
  }
  std::cout << "cluster: " << by_class.size() << " classes -> " << out_path << "\n";
  return 0;
}

int cmd_fit(const std::string& input, const std::string& labels_path,
            const std::string& participants_path, const std::string& out_dir,
            double alpha) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open time-location csv: " + input);
  auto records = avsim::mobility::read_time_location_csv(in);

  std::map<std::string, std::string> occupation;
  if (!participants_path.empty()) occupation = read_participants_csv(participants_path);
  auto class_of = [&](const std::string& pid) {
    auto it = occupation.find(pid);
    return it == occupation.end() ? std::string("all") : it->second;
  };

  std::map<std::pair<std::string, int>, int> subclass_of;
  if (!labels_path.empty()) {
    std::ifstream lf(labels_path);
    if (!lf) throw std::runtime_error("cannot open labels csv: " + labels_path);
    std::string line;
    bool header = true;
    while (std::getline(lf, line)) {
      auto t = avsim::core::trim(line);
      if (t.empty()) continue;
      if (header) {
        header = false;
        continue;
      }
      auto cols = avsim::core::split(t, ',');
      if (cols.size() != 3) throw std::runtime_error("labels csv: expected 3 columns");
      subclass_of[{std::string(avsim::core::trim(cols[0])),
                   int(avsim::core::parse_long(avsim::core::trim(cols[1])))}] =
          int(avsim::core::parse_long(avsim::core::trim(cols[2])));
    }
  }

  // (class, subclass, weekend?) -> records of the matching participant-days.
  std::map<std::tuple<std::string, int, bool>,
           std::vector<avsim::mobility::TimeLocationRecord>>
      groups;
  for (const auto& r : records) {
    int sub = 0;
    auto it = subclass_of.find({r.participant, r.day_index});
    if (it != subclass_of.end()) sub = it->second;
    groups[{class_of(r.participant), sub, is_weekend_day(r.day_index)}].push_back(r);
  }

  std::filesystem::create_directories(out_dir);
  nlohmann::ordered_json index;
  for (const auto& [key, group_records] : groups) {
    const auto& [cls, sub, weekend] = key;
    auto m = avsim::traj::estimate_matrices(group_records, alpha);
    std::string name =
        cls + "_sub" + std::to_string(sub) + (weekend ? "_we" : "_wd") + ".mat";
    {
      std::ofstream f(out_dir + "/" + name);
      avsim::traj::write_matrices(f, m);
    }
    nlohmann::ordered_json gj;
    gj["class"] = cls;
    gj["subclass"] = sub;
    gj["day_type"] = weekend ? "weekend" : "weekday";
    gj["file"] = name;
    gj["locations"] = m.rows();
    index.push_back(gj);
  }
  {
    std::ofstream f(out_dir + "/index.json");
    f << index.dump(2) << "\n";
  }
  std::cout << "fit: " << groups.size() << " matrix sets -> " << out_dir << "\n";
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 int threads, int64_t seed_override) {
  // Scenario parsing and engine setup are config territory; failures there
  // exit 2. Anything thrown once the run has started is a runtime abort.
  std::unique_ptr<avsim::sim::Engine> engine;
  avsim::sim::Scenario sc;
  try {
    sc = avsim::sim::Scenario::from_json_file(scenario_path);
    if (threads > 0) sc.threads = threads;
    if (seed_override >= 0) sc.seed = uint64_t(seed_override);
    engine = std::make_unique<avsim::sim::Engine>(sc);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  avsim::sim::RunSummary summary;
  try {
    summary = engine->run(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "runtime abort: " << e.what() << "\n";
    return kExitRuntime;
  }
  for (const auto& d : summary.diagnostics) std::cerr << "simulate: " << d << "\n";
  std::cout << "simulate: " << sc.name << " | population " << summary.population
            << " | days " << sc.duration_days << "\n"
            << "  peak infectious: " << summary.peak_infectious << "\n"
            << "  exposures: airborne " << summary.total_airborne_exposures
            << ", vector " << summary.total_vector_exposures << "\n"
            << "  final recovered: " << summary.final_recovered << ", dead "
            << summary.final_dead << "\n"
            << "  outputs: " << out_dir << "/{states.csv,events.jsonl,patches.csv"
            << (sc.write_agents ? ",agents.jsonl" : "") << "}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"avsim: GPS-informed agent-based epidemic simulator"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "generate synthetic GPS traces");
  std::string synth_profiles, synth_out = "synth_out";
  uint64_t synth_seed = 7;
  int synth_participants = 6;
  synth->add_option("--profiles", synth_profiles, "profiles json (default: built-in two-shift)");
  synth->add_option("--out-dir", synth_out, "output directory");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--participants", synth_participants, "participants per built-in group");

  auto* mobility = app.add_subcommand("mobility", "traces -> labeled time-location csv");
  std::string mob_traces, mob_gaz, mob_out = "timeloc.csv", mob_regions;
  double mob_eps = 5.0;
  int mob_minpts = 10;
  mobility->add_option("--traces", mob_traces, "gps csv")->required();
  mobility->add_option("--gazetteer", mob_gaz, "gazetteer json")->required();
  mobility->add_option("--out", mob_out, "output csv");
  mobility->add_option("--eps", mob_eps, "DBSCAN epsilon in meters");
  mobility->add_option("--min-pts", mob_minpts, "DBSCAN minPts");
  mobility->add_option("--regions-out", mob_regions, "stay region csv");

  auto* cluster = app.add_subcommand("cluster", "discover behavioral sub-classes");
  std::string clu_in, clu_participants, clu_out = "labels.csv", clu_report = "report.json";
  int clu_threads = 1;
  uint64_t clu_seed = 0;
  cluster->add_option("--input", clu_in, "time-location csv")->required();
  cluster->add_option("--participants", clu_participants, "participant_id,occupation csv");
  cluster->add_option("--out", clu_out, "labels csv");
  cluster->add_option("--report", clu_report, "selection report json");
  cluster->add_option("--threads", clu_threads, "sigma sweep threads");
  cluster->add_option("--seed", clu_seed, "k-means seed");

  auto* fit = app.add_subcommand("fit", "estimate visit/occupancy matrices");
  std::string fit_in, fit_labels, fit_participants, fit_out = "matrices";
  double fit_alpha = 0.0;
  fit->add_option("--input", fit_in, "time-location csv")->required();
  fit->add_option("--labels", fit_labels, "cluster labels csv");
  fit->add_option("--participants", fit_participants, "participant_id,occupation csv");
  fit->add_option("--out-dir", fit_out, "output directory");
  fit->add_option("--alpha", fit_alpha, "Laplace smoothing");

  auto* simulate = app.add_subcommand("simulate", "run a scenario");
  std::string sim_scenario, sim_out = "sim_out";
  int sim_threads = 0;
  int64_t sim_seed = -1;
  simulate->add_option("--scenario", sim_scenario, "scenario json")->required();
  simulate->add_option("--out-dir", sim_out, "output directory");
  simulate->add_option("--threads", sim_threads, "worker threads (0: scenario value)");
  simulate->add_option("--seed", sim_seed, "override scenario seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synth(synth_profiles, synth_out, synth_seed, synth_participants);
    if (mobility->parsed())
      return cmd_mobility(mob_traces, mob_gaz, mob_out, mob_eps, mob_minpts, mob_regions);
    if (cluster->parsed())
      return cmd_cluster(clu_in, clu_participants, clu_out, clu_report, clu_threads,
                         clu_seed);
    if (fit->parsed())
      return cmd_fit(fit_in, fit_labels, fit_participants, fit_out, fit_alpha);
    if (simulate->parsed())
      return cmd_simulate(sim_scenario, sim_out, sim_threads, sim_seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
