#include "dimerwork/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "dimerwork/thermo.hpp"

namespace dimerwork {

std::vector<double> linspace(double first, double last, std::size_t count) {
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = first;
    return v;
  }
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  if (count > 1) v.back() = last;
  return v;
}

namespace {

void require_increasing(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw DomainError(std::string("SweepGrid: ") + name + " is empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) {
      throw DomainError(std::string("SweepGrid: ") + name + " must be strictly increasing");
    }
  }
}

}  // namespace

void SweepGrid::validate() const {
  require_increasing(U_values, "U_values");
  require_increasing(tau_values, "tau_values");
  require_increasing(kT_values, "kT_values");
  if (U_values.front() < 0.0) throw DomainError("SweepGrid: U must be non-negative");
  if (!(tau_values.front() > 0.0)) throw DomainError("SweepGrid: tau must be positive");
  if (!(kT_values.front() > 0.0)) throw DomainError("SweepGrid: kT must be positive");
  if (protocols.empty()) throw DomainError("SweepGrid: no protocols selected");
}

std::size_t SweepGrid::point_count() const {
  return protocols.size() * kT_values.size() * U_values.size() * tau_values.size();
}

std::size_t steps_for(const SweepSettings& settings, const DriveParams& p, double kT) {
  const std::size_t base = settings.steps > 0 ? settings.steps : default_steps(p.tau);
  if (!settings.auto_steps) return base;
  // The interacting family is the stiffest one; its step count is used for
  // every protocol at this point.
  const HamiltonianAt h_at = [&p](double t) { return hamiltonian(p, external_potential(t, p)); };
  const ThermalState rho0 = thermal_state(h_at(0.0), kT);
  return converged_steps(rho0.rho.matrix(), h_at, p.tau, base);
}

SweepRow run_point(ProtocolKind protocol, double kT, double U, double tau,
                   const SweepSettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  DriveParams p = settings.drive;
  p.U = U;
  p.tau = tau;
  const TimeGrid grid(tau, steps_for(settings, p, kT));
  const ProtocolResult r = run_protocol(protocol, p, kT, grid, settings.options);

  SweepRow row;
  row.protocol = protocol;
  row.kT = kT;
  row.U = U;
  row.tau = tau;
  row.W = r.W;
  row.n1_tau = r.traj.n1.back();
  row.n2_tau = r.traj.n2.back();
  if (r.scf) {
    row.scf_iterations = r.scf->iterations;
    row.converged = r.scf->converged;
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
  return row;
}

SweepResult run_sweep(const SweepGrid& grid, const SweepSettings& settings, unsigned workers) {
  grid.validate();
  struct Point {
    ProtocolKind protocol;
    double kT, U, tau;
  };
  std::vector<Point> points;
  points.reserve(grid.point_count());
  std::vector<ProtocolKind> protocols = grid.protocols;
  std::sort(protocols.begin(), protocols.end());
  protocols.erase(std::unique(protocols.begin(), protocols.end()), protocols.end());
  for (ProtocolKind proto : protocols)
    for (double kT : grid.kT_values)
      for (double U : grid.U_values)
        for (double tau : grid.tau_values) points.push_back({proto, kT, U, tau});

  struct Slot {
    std::optional<SweepRow> row;
    std::string error;
  };
  std::vector<Slot> slots(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
      const Point& pt = points[i];
      try {
        slots[i].row = run_point(pt.protocol, pt.kT, pt.U, pt.tau, settings);
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, points.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  SweepResult result;
  result.rows.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (slots[i].row) {
      result.rows.push_back(*slots[i].row);
    } else {
      const Point& pt = points[i];
      result.failures.push_back({pt.protocol, pt.kT, pt.U, pt.tau, slots[i].error});
    }
  }
  return result;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, bool include_timing) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& r : result.rows) {
    out << to_string(r.protocol) << ',' << format_number(r.kT) << ',' << format_number(r.U) << ','
        << format_number(r.tau) << ',' << format_number(r.W) << ',' << format_number(r.n1_tau)
        << ',' << format_number(r.n2_tau) << ',' << r.scf_iterations << ','
        << (r.converged ? 1 : 0) << ',' << (include_timing ? format_number(r.wall_ms) : "0")
        << '\n';
  }
}

SweepResult read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    throw DomainError("read_sweep_csv: unexpected header");
  }
  SweepResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) {
      throw DomainError("read_sweep_csv: line " + std::to_string(line_no) + " has " +
                        std::to_string(f.size()) + " fields");
    }
    try {
      SweepRow r;
      r.protocol = parse_protocol(f[0]);
      r.kT = std::stod(f[1]);
      r.U = std::stod(f[2]);
      r.tau = std::stod(f[3]);
      r.W = std::stod(f[4]);
      r.n1_tau = std::stod(f[5]);
      r.n2_tau = std::stod(f[6]);
      r.scf_iterations = std::stoul(f[7]);
      r.converged = f[8] == "1";
      r.wall_ms = std::stod(f[9]);
      result.rows.push_back(r);
    } catch (const std::logic_error& e) {
      throw DomainError("read_sweep_csv: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return result;
}

std::vector<RelativeErrorRow> relative_error_map(const SweepResult& approx,
                                                 const SweepResult& exact) {
  using Key = std::tuple<double, double, double>;
  std::map<Key, double> reference;
  for (const SweepRow& r : exact.rows) reference[{r.kT, r.U, r.tau}] = r.W;
  if (reference.size() != exact.rows.size()) {
    throw DomainError("relative_error_map: reference holds more than one protocol");
  }
  if (approx.rows.size() != exact.rows.size()) {
    throw DomainError("relative_error_map: grids have different sizes");
  }
  std::vector<RelativeErrorRow> out;
  out.reserve(approx.rows.size());
  for (const SweepRow& r : approx.rows) {
    const auto it = reference.find({r.kT, r.U, r.tau});
    if (it == reference.end()) {
      throw DomainError("relative_error_map: point (kT=" + format_number(r.kT) +
                        ", U=" + format_number(r.U) + ", tau=" + format_number(r.tau) +
                        ") missing from the reference");
    }
    out.push_back({r.protocol, r.kT, r.U, r.tau,
                   std::abs(r.W - it->second) / std::max(std::abs(it->second), 1e-6)});
  }
  return out;
}

SweepResult select(const SweepResult& result, ProtocolKind protocol, double kT) {
  SweepResult out;
  for (const SweepRow& r : result.rows) {
    if (r.protocol == protocol && r.kT == kT) out.rows.push_back(r);
  }
  return out;
}

}  // namespace dimerwork
