#include "avsim/trajectory/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "avsim/core/text.hpp"
#include "avsim/core/time.hpp"

namespace avsim::traj {

using core::kMinutesPerDay;

int ProbabilityMatrices::row_of(uint16_t code) const {
  auto it = std::lower_bound(codes.begin(), codes.end(), code);
  if (it == codes.end() || *it != code) return -1;
  return int(it - codes.begin());
}

void ProbabilityMatrices::finalize() {
  const int n = rows();
  if (n == 0) throw std::invalid_argument("matrices: empty vocabulary");
  if (visit.rows() != n || visit.cols() != kMinutesPerDay ||
      occupancy.rows() != n || occupancy.cols() != kMinutesPerDay)
    throw std::invalid_argument("matrices: bad shape");
  constexpr double kTol = 1e-9;
  for (int t = 0; t < kMinutesPerDay; ++t) {
    double s = visit.col(t).sum();
    if (std::abs(s - 1.0) > kTol)
      throw std::domain_error("matrices: visit column " + std::to_string(t) +
                              " sums to " + core::fmt_exact(s));
  }
  for (int l = 0; l < n; ++l) {
    double s = occupancy.row(l).sum();
    if (s != 0.0 && std::abs(s - 1.0) > kTol)
      throw std::domain_error("matrices: occupancy row " + std::to_string(l) +
                              " sums to " + core::fmt_exact(s));
  }
  if ((visit.array() < 0).any() || (occupancy.array() < 0).any())
    throw std::domain_error("matrices: negative entries");

  visit_cum_ = visit;
  for (int r = 1; r < n; ++r) visit_cum_.row(r) += visit_cum_.row(r - 1);
  occupancy_cum_ = occupancy;
  for (int c = 1; c < kMinutesPerDay; ++c)
    occupancy_cum_.col(c) += occupancy_cum_.col(c - 1);
}

ProbabilityMatrices estimate_matrices_from_days(
    const std::vector<std::vector<uint16_t>>& days,
    const std::vector<std::pair<uint16_t, std::string>>& vocabulary,
    double alpha) {
  if (days.empty())
    throw std::invalid_argument("estimate_matrices: need at least one complete day");
  ProbabilityMatrices m;
  std::map<uint16_t, std::string> vocab(vocabulary.begin(), vocabulary.end());
  for (const auto& day : days) {
    if (int(day.size()) != kMinutesPerDay)
      throw std::invalid_argument("estimate_matrices: day is not 1440 minutes");
    for (uint16_t c : day)
      if (!vocab.count(c)) vocab[c] = "code_" + std::to_string(c);
  }
  for (const auto& [code, label] : vocab) {
    m.codes.push_back(code);
    m.labels.push_back(label);
  }
  const int n = m.rows();
  m.visit = Eigen::MatrixXd::Zero(n, kMinutesPerDay);
  m.occupancy = Eigen::MatrixXd::Zero(n, kMinutesPerDay);

  Eigen::VectorXd stay_totals = Eigen::VectorXd::Zero(n);
  for (const auto& day : days) {
    int start = 0;
    for (int t = 0; t < kMinutesPerDay; ++t) {
      int row = m.row_of(day[t]);
      m.visit(row, t) += 1.0;
      bool run_ends = t + 1 == kMinutesPerDay || day[t + 1] != day[t];
      if (run_ends) {
        int duration = t - start + 1;
        m.occupancy(row, duration - 1) += 1.0;
        stay_totals[row] += 1.0;
        start = t + 1;
      }
    }
  }

  double n_days = double(days.size());
  for (int t = 0; t < kMinutesPerDay; ++t)
    m.visit.col(t) = (m.visit.col(t).array() + alpha) / (n_days + alpha * n);
  for (int l = 0; l < n; ++l) {
    double total = stay_totals[l];
    if (total == 0.0 && alpha == 0.0) continue;  // never visited: empty row
    m.occupancy.row(l) =
        (m.occupancy.row(l).array() + alpha) / (total + alpha * kMinutesPerDay);
  }
  m.finalize();
  return m;
}

ProbabilityMatrices estimate_matrices(
    std::span<const mobility::TimeLocationRecord> records, double alpha) {
  std::map<std::pair<std::string, int>, std::vector<uint16_t>> days;
  std::map<uint16_t, std::string> labels;
  for (const auto& r : records) {
    auto& day = days[{r.participant, r.day_index}];
    if (day.empty()) day.assign(kMinutesPerDay, mobility::kInTransit);
    day.at(size_t(r.minute)) = r.code;
    labels.emplace(r.code, r.label);
  }
  std::vector<std::vector<uint16_t>> rows;
  rows.reserve(days.size());
  for (auto& [key, day] : days) rows.push_back(std::move(day));
  std::vector<std::pair<uint16_t, std::string>> vocab(labels.begin(), labels.end());
  return estimate_matrices_from_days(rows, vocab, alpha);
}

DailyTrajectory generate_trajectory(const ProbabilityMatrices& m,
                                    core::Rng& rng) {
  if (!m.finalized())
    throw std::logic_error("generate_trajectory: matrices not finalized");
  const auto& vcum = m.visit_cumulative();
  const auto& ocum = m.occupancy_cumulative();
  const int n = m.rows();

  DailyTrajectory out;
  out.minutes.resize(kMinutesPerDay);
  int t = 0;
  while (t < kMinutesPerDay) {
    // Roulette wheel over the visit column at the current minute.
    double x = rng.next_double() * vcum(n - 1, t);
    int lo = 0, hi = n - 1;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (vcum(mid, t) > x)
        hi = mid;
      else
        lo = mid + 1;
    }
    int row = lo;

    // Feasible durations only: renormalize the occupancy row over what still
    // fits in the day instead of truncating afterwards.
    int window = kMinutesPerDay - t;
    double total = ocum(row, window - 1);
    int duration;
    if (total <= 0.0) {
      duration = 1;
      out.empty_row_fallback = true;
    } else {
      double y = rng.next_double() * total;
      int dlo = 0, dhi = window - 1;
      while (dlo < dhi) {
        int mid = (dlo + dhi) / 2;
        if (ocum(row, mid) > y)
          dhi = mid;
        else
          dlo = mid + 1;
      }
      duration = dlo + 1;
    }
    std::fill(out.minutes.begin() + t, out.minutes.begin() + t + duration, row);
    out.stays.push_back({row, t, duration});
    t += duration;
  }
  return out;
}

DistributionFit validate_distribution(std::span<const DailyTrajectory> trajectories,
                                      const ProbabilityMatrices& m) {
  if (trajectories.empty())
    throw std::invalid_argument("validate_distribution: no trajectories");
  const int n = m.rows();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, kMinutesPerDay);
  for (const auto& tr : trajectories)
    for (int t = 0; t < kMinutesPerDay; ++t) counts(tr.minutes[t], t) += 1.0;
  counts /= double(trajectories.size());

  DistributionFit fit;
  fit.per_minute_tv.resize(kMinutesPerDay);
  for (int t = 0; t < kMinutesPerDay; ++t) {
    double tv = 0.5 * (counts.col(t) - m.visit.col(t)).cwiseAbs().sum();
    fit.per_minute_tv[t] = tv;
    fit.mean_tv += tv;
  }
  fit.mean_tv /= kMinutesPerDay;
  return fit;
}

void write_matrices(std::ostream& out, const ProbabilityMatrices& m) {
  const int n = m.rows();
  out << "avsim-matrices v1\n";
  out << "rows " << n << "\n";
  for (int l = 0; l < n; ++l)
    out << "row " << l << ' ' << m.codes[l] << ' ' << m.labels[l] << "\n";
  auto dump = [&](const char* name, const Eigen::MatrixXd& mat) {
    out << name << ' ' << n << ' ' << kMinutesPerDay << "\n";
    for (int l = 0; l < n; ++l) {
      for (int t = 0; t < kMinutesPerDay; ++t) {
        if (t) out << ' ';
        out << core::fmt_exact(mat(l, t));
      }
      out << "\n";
    }
  };
  dump("visit", m.visit);
  dump("occupancy", m.occupancy);
  out << "end\n";
}

ProbabilityMatrices read_matrices(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line))
      throw std::runtime_error("matrices file: unexpected end of file");
    return line;
  };
  if (next_line() != "avsim-matrices v1")
    throw std::runtime_error("matrices file: bad magic line");
  std::istringstream hdr(next_line());
  std::string word;
  int n = 0;
  hdr >> word >> n;
  if (word != "rows" || n <= 0) throw std::runtime_error("matrices file: bad rows line");

  ProbabilityMatrices m;
  m.codes.resize(n);
  m.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    std::istringstream row(next_line());
    int idx, code;
    row >> word >> idx >> code;
    if (word != "row" || idx != i) throw std::runtime_error("matrices file: bad row line");
    std::string label;
    std::getline(row, label);
    m.codes[i] = uint16_t(code);
    m.labels[i] = std::string(core::trim(label));
  }
  auto load = [&](const char* name) {
    std::istringstream hd(next_line());
    int rows, cols;
    hd >> word >> rows >> cols;
    if (word != name || rows != n || cols != kMinutesPerDay)
      throw std::runtime_error(std::string("matrices file: bad ") + name + " header");
    Eigen::MatrixXd mat(rows, cols);
    for (int l = 0; l < rows; ++l) {
      std::istringstream rowstream(next_line());
      for (int t = 0; t < cols; ++t)
        if (!(rowstream >> mat(l, t)))
          throw std::runtime_error(std::string("matrices file: short ") + name + " row");
    }
    return mat;
  };
  m.visit = load("visit");
  m.occupancy = load("occupancy");
  if (next_line() != "end") throw std::runtime_error("matrices file: missing end");
  for (int i = 1; i < n; ++i)
    if (m.codes[i] <= m.codes[i - 1])
      throw std::runtime_error("matrices file: codes must be strictly increasing");
  m.finalize();
  return m;
}

ProbabilityMatrices read_matrices_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrices file: " + path);
  return read_matrices(in);
}

}  // namespace avsim::traj
