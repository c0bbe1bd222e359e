#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dimerwork/dynamics.hpp"
#include "dimerwork/thermo.hpp"
#include "dimerwork/work.hpp"
#include "json.hpp"

namespace dimerwork::cli {

namespace {

using nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Values given on the command line; each one overrides the config file.
struct Flags {
  std::optional<std::string> config;
  std::optional<double> U, tauJ, kT, A0, Atau, mixing;
  std::optional<std::string> protocol, sign, plda_density, out;
  std::optional<std::size_t> M, max_iter;
  std::optional<unsigned> workers;
  bool auto_dt = false;
  bool strict = false;

  std::optional<std::vector<double>> U_values, tau_values, kT_values;
  std::optional<std::vector<std::string>> protocols;
  std::optional<std::size_t> U_points, tau_points;
  std::optional<double> U_max, tau_min, tau_max;
  bool no_timing = false;

  std::optional<double> kT_min, kT_max;
  std::optional<std::size_t> kT_points;
  std::optional<std::string> dump_iterations;
};

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "JSON run configuration; flags override its values");
  sub.add_option("--U", f.U, "interaction strength U/J (default 0)");
  sub.add_option("--tauJ", f.tauJ, "evolution time tau*J (default 1)");
  sub.add_option("--kT", f.kT, "temperature k_B T/J (default 2)");
  sub.add_option("--A0", f.A0, "static drive amplitude A0/J (default 1)");
  sub.add_option("--Atau", f.Atau, "drive amplitude Atau/J (default 7)");
  sub.add_option("--protocol", f.protocol, "exact | noninteracting | plda | alda (default exact)");
  sub.add_option("--M", f.M, "time steps (default max(1000, ceil(2000 tau J)))");
  sub.add_flag("--auto-dt", f.auto_dt, "double M until n1(tau) changes by less than 1e-7");
  sub.add_option("--workers", f.workers, "worker threads for sweeps (0 = all cores)");
  sub.add_option("--mixing", f.mixing, "ALDA density mixing in (0, 1]; 1 = plain iteration");
  sub.add_option("--max-iter", f.max_iter, "ALDA iteration limit (default 200)");
  sub.add_option("--sign-convention", f.sign, "v1-plus | v1-minus (default v1-plus)");
  sub.add_option("--plda-density", f.plda_density,
                 "density freezing the static p-LDA functionals: scf | exact (default scf)");
  sub.add_option("--out", f.out, "output file (default standard output)");
  sub.add_flag("--strict", f.strict, "exit with code 3 when a self-consistent loop fails");
}

// ---------------------------------------------------------------------------
// configuration

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw DomainError(std::string("config: '") + key + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::vector<ProtocolKind> parse_protocol_list(const std::vector<std::string>& names) {
  std::vector<ProtocolKind> out;
  for (const auto& n : names) out.push_back(parse_protocol(n));
  return out;
}

}  // namespace

void apply_config_json(const std::string& text, RunConfig& cfg) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DomainError("config: top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    const char* k = key.c_str();
    if (key == "U") cfg.drive.U = get_as<double>(value, k);
    else if (key == "tauJ") cfg.drive.tau = get_as<double>(value, k);
    else if (key == "kT") cfg.kT = get_as<double>(value, k);
    else if (key == "A0") cfg.drive.A0 = get_as<double>(value, k);
    else if (key == "Atau") cfg.drive.Atau = get_as<double>(value, k);
    else if (key == "protocol") cfg.protocol = parse_protocol(get_as<std::string>(value, k));
    else if (key == "M") cfg.steps = get_count(value, k);
    else if (key == "auto_dt") cfg.auto_steps = get_as<bool>(value, k);
    else if (key == "workers") cfg.workers = get_as<unsigned>(value, k);
    else if (key == "mixing") cfg.options.mixing = get_as<double>(value, k);
    else if (key == "max_iter") cfg.options.max_iter = get_count(value, k);
    else if (key == "sign_convention")
      cfg.drive.sign = parse_sign_convention(get_as<std::string>(value, k));
    else if (key == "plda_density")
      cfg.options.plda_density = parse_plda_density(get_as<std::string>(value, k));
    else if (key == "out") cfg.out = get_as<std::string>(value, k);
    else if (key == "strict") cfg.strict = get_as<bool>(value, k);
    else if (key == "timing") cfg.include_timing = get_as<bool>(value, k);
    else if (key == "dump_iterations") cfg.dump_iterations = get_as<std::string>(value, k);
    else if (key == "U_values") cfg.grid.U_values = get_as<std::vector<double>>(value, k);
    else if (key == "tau_values") cfg.grid.tau_values = get_as<std::vector<double>>(value, k);
    else if (key == "kT_values") cfg.grid.kT_values = get_as<std::vector<double>>(value, k);
    else if (key == "protocols")
      cfg.grid.protocols = parse_protocol_list(get_as<std::vector<std::string>>(value, k));
    else if (key == "populations_kT_min") cfg.populations_kT_min = get_as<double>(value, k);
    else if (key == "populations_kT_max") cfg.populations_kT_max = get_as<double>(value, k);
    else if (key == "populations_points") cfg.populations_points = get_count(value, k);
    else throw DomainError("config: unknown key '" + key + "'");
  }
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Defaults, then the config file, then explicit flags.
RunConfig resolve(const Flags& f, bool& protocol_given) {
  RunConfig cfg;
  protocol_given = false;
  if (f.config) {
    const std::string text = read_file(*f.config);
    apply_config_json(text, cfg);
    protocol_given = json::parse(text).contains("protocol");
  }
  if (f.U) cfg.drive.U = *f.U;
  if (f.tauJ) cfg.drive.tau = *f.tauJ;
  if (f.kT) cfg.kT = *f.kT;
  if (f.A0) cfg.drive.A0 = *f.A0;
  if (f.Atau) cfg.drive.Atau = *f.Atau;
  if (f.protocol) {
    cfg.protocol = parse_protocol(*f.protocol);
    protocol_given = true;
  }
  if (f.M) cfg.steps = *f.M;
  if (f.auto_dt) cfg.auto_steps = true;
  if (f.workers) cfg.workers = *f.workers;
  if (f.mixing) cfg.options.mixing = *f.mixing;
  if (f.max_iter) cfg.options.max_iter = *f.max_iter;
  if (f.sign) cfg.drive.sign = parse_sign_convention(*f.sign);
  if (f.plda_density) cfg.options.plda_density = parse_plda_density(*f.plda_density);
  if (f.out) cfg.out = *f.out;
  if (f.strict) cfg.strict = true;

  if (f.U_points || f.U_max) {
    cfg.grid.U_values = linspace(0.0, f.U_max.value_or(10.0), f.U_points.value_or(40));
  }
  if (f.tau_points || f.tau_min || f.tau_max) {
    cfg.grid.tau_values =
        linspace(f.tau_min.value_or(0.1), f.tau_max.value_or(10.0), f.tau_points.value_or(40));
  }
  if (f.U_values) cfg.grid.U_values = *f.U_values;
  if (f.tau_values) cfg.grid.tau_values = *f.tau_values;
  if (f.kT_values) cfg.grid.kT_values = *f.kT_values;
  if (f.protocols) cfg.grid.protocols = parse_protocol_list(*f.protocols);
  if (f.no_timing) cfg.include_timing = false;

  if (f.kT_min) cfg.populations_kT_min = *f.kT_min;
  if (f.kT_max) cfg.populations_kT_max = *f.kT_max;
  if (f.kT_points) cfg.populations_points = *f.kT_points;
  if (f.dump_iterations) cfg.dump_iterations = *f.dump_iterations;

  cfg.drive.validate();
  if (!(cfg.kT > 0.0)) throw DomainError("kT must be positive");
  if (!(cfg.options.mixing > 0.0 && cfg.options.mixing <= 1.0)) {
    throw DomainError("mixing must lie in (0, 1]");
  }
  if (cfg.options.max_iter == 0) throw DomainError("max-iter must be at least 1");
  return cfg;
}

// Writes to --out when given, otherwise to the supplied stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw IoError("cannot open " + path + " for writing");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }
  void close() {
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw IoError("write failed");
    } else if (!*stream_) {
      throw IoError("write failed");
    }
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

TimeGrid make_grid(const RunConfig& cfg) {
  SweepSettings s;
  s.drive = cfg.drive;
  s.steps = cfg.steps;
  s.auto_steps = cfg.auto_steps;
  return TimeGrid(cfg.drive.tau, steps_for(s, cfg.drive, cfg.kT));
}

bool scf_failed(const ProtocolResult& r) { return r.scf && !r.scf->converged; }

int cmd_point(const RunConfig& cfg, std::ostream& out) {
  const ProtocolResult r = run_protocol(cfg.protocol, cfg.drive, cfg.kT, make_grid(cfg), cfg.options);
  const double residual = jarzynski_residual(r.dist);
  Sink sink(cfg.out, out);
  *sink << "protocol,kT_over_J,U_over_J,tauJ,W_over_J,n1_tau,n2_tau,jarzynski_residual,"
           "scf_iterations,converged\n"
        << to_string(cfg.protocol) << ',' << format_number(cfg.kT) << ','
        << format_number(cfg.drive.U) << ',' << format_number(cfg.drive.tau) << ','
        << format_number(r.W) << ',' << format_number(r.traj.n1.back()) << ','
        << format_number(r.traj.n2.back()) << ',' << format_number(residual) << ','
        << (r.scf ? r.scf->iterations : 0) << ',' << (scf_failed(r) ? 0 : 1) << '\n';
  sink.close();
  out << "# protocol " << to_string(cfg.protocol) << "  U/J = " << format_number(cfg.drive.U)
      << "  tauJ = " << format_number(cfg.drive.tau) << "  kT/J = " << format_number(cfg.kT)
      << '\n'
      << "# extracted work W/J = " << format_number(r.W) << '\n'
      << "# n1(tau) = " << format_number(r.traj.n1.back())
      << "  n2(tau) = " << format_number(r.traj.n2.back()) << '\n'
      << "# Jarzynski residual = " << format_number(residual) << '\n';
  if (r.scf) {
    out << "# SCF iterations = " << r.scf->iterations
        << (r.scf->converged ? " (converged)" : " (NOT converged)") << '\n';
  }
  return cfg.strict && scf_failed(r) ? kNumericalFailure : kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SweepSettings s;
  s.drive = cfg.drive;
  s.options = cfg.options;
  s.steps = cfg.steps;
  s.auto_steps = cfg.auto_steps;
  const SweepResult result = run_sweep(cfg.grid, s, cfg.workers);
  Sink sink(cfg.out, out);
  write_sweep_csv(*sink, result, cfg.include_timing);
  sink.close();
  bool unconverged = false;
  for (const SweepRow& r : result.rows) unconverged |= !r.converged;
  for (const SweepFailure& f : result.failures) {
    err << "failed: protocol=" << to_string(f.protocol) << " kT=" << format_number(f.kT)
        << " U=" << format_number(f.U) << " tau=" << format_number(f.tau) << ": " << f.message
        << '\n';
  }
  return cfg.strict && (unconverged || !result.failures.empty()) ? kNumericalFailure : kOk;
}

int cmd_populations(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.populations_kT_min > 0.0) || !(cfg.populations_kT_max >= cfg.populations_kT_min) ||
      cfg.populations_points < 1) {
    throw DomainError("populations: need 0 < kT-min <= kT-max and kT-points >= 1");
  }
  const HermitianOperator h0 = hamiltonian(cfg.drive, external_potential(0.0, cfg.drive));
  Sink sink(cfg.out, out);
  *sink << "kT_over_J,p0,p1,p2,p3\n";
  const double lo = std::log(cfg.populations_kT_min);
  const double hi = std::log(cfg.populations_kT_max);
  const std::size_t n = cfg.populations_points;
  for (std::size_t i = 0; i < n; ++i) {
    const double kT =
        n == 1 ? cfg.populations_kT_min
               : (i + 1 == n ? cfg.populations_kT_max
                             : std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                                 static_cast<double>(n - 1)));
    const ThermalState st = thermal_state(h0, kT);
    *sink << format_number(kT);
    for (double p : st.populations) *sink << ',' << format_number(p);
    *sink << '\n';
  }
  sink.close();
  return kOk;
}

int cmd_trajectory(const RunConfig& cfg, std::ostream& out) {
  const TimeGrid grid = make_grid(cfg);
  const ProtocolResult r = run_protocol(cfg.protocol, cfg.drive, cfg.kT, grid, cfg.options);
  Sink sink(cfg.out, out);
  *sink << "t,n1,n2\n";
  for (std::size_t k = 0; k <= grid.steps(); ++k) {
    *sink << format_number(grid.time(k)) << ',' << format_number(r.traj.n1[k]) << ','
          << format_number(r.traj.n2[k]) << '\n';
  }
  sink.close();
  return cfg.strict && scf_failed(r) ? kNumericalFailure : kOk;
}

int cmd_workdist(const RunConfig& cfg, std::ostream& out) {
  const ProtocolResult r = run_protocol(cfg.protocol, cfg.drive, cfg.kT, make_grid(cfg), cfg.options);
  Sink sink(cfg.out, out);
  *sink << "w_over_J,probability\n";
  for (const WorkSample& s : r.dist.samples) {
    *sink << format_number(s.w) << ',' << format_number(s.prob) << '\n';
  }
  sink.close();
  return cfg.strict && scf_failed(r) ? kNumericalFailure : kOk;
}

int cmd_scf_trace(RunConfig cfg, bool protocol_given, std::ostream& out) {
  if (!protocol_given) cfg.protocol = ProtocolKind::ALDAInspired;
  if (cfg.protocol == ProtocolKind::StaticPLDA) {
    SCFReport report;
    bool converged = true;
    try {
      static_ks_density(cfg.drive, cfg.kT, cfg.options, &report);
    } catch (const NumericalError&) {
      converged = false;
    }
    Sink sink(cfg.out, out);
    *sink << "iteration,residual\n";
    for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
      *sink << i + 1 << ',' << format_number(report.residual_history[i]) << '\n';
    }
    sink.close();
    return cfg.strict && !converged ? kNumericalFailure : kOk;
  }
  if (cfg.protocol != ProtocolKind::ALDAInspired) {
    throw DomainError("scf-trace: protocol has no self-consistent loop (use alda or plda)");
  }
  cfg.options.record_iterations = !cfg.dump_iterations.empty();
  const TimeGrid grid = make_grid(cfg);
  const ProtocolResult r = alda_run(cfg.drive, cfg.kT, grid, cfg.options);
  {
    Sink sink(cfg.out, out);
    *sink << "iteration,residual\n";
    for (std::size_t i = 0; i < r.scf->residual_history.size(); ++i) {
      *sink << i + 1 << ',' << format_number(r.scf->residual_history[i]) << '\n';
    }
    sink.close();
  }
  if (!cfg.dump_iterations.empty()) {
    std::ofstream dump(cfg.dump_iterations);
    if (!dump) throw IoError("cannot open " + cfg.dump_iterations + " for writing");
    dump << "iteration,t,n1\n";
    for (std::size_t i = 0; i < r.iteration_n1.size(); ++i) {
      for (std::size_t k = 0; k <= grid.steps(); ++k) {
        dump << i + 1 << ',' << format_number(grid.time(k)) << ','
             << format_number(r.iteration_n1[i][k]) << '\n';
      }
    }
    if (!dump) throw IoError("write failed: " + cfg.dump_iterations);
  }
  return cfg.strict && scf_failed(r) ? kNumericalFailure : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and Kohn-Sham work statistics of the driven Hubbard dimer", "dimerwork"};
  app.require_subcommand(1);
  Flags f;

  auto* point = app.add_subcommand("point", "W, n1(tau) and Jarzynski residual at one point");
  auto* sweep = app.add_subcommand("sweep", "protocol x kT x U x tau grid to CSV");
  auto* pops = app.add_subcommand("populations", "thermal populations p_n of H(0) versus kT");
  auto* traj = app.add_subcommand("trajectory", "site occupations n1(t), n2(t)");
  auto* wdist = app.add_subcommand("workdist", "two-point-measurement work distribution P(w)");
  auto* trace = app.add_subcommand("scf-trace", "self-consistency residual per iteration");
  for (CLI::App* sub : {point, sweep, pops, traj, wdist, trace}) add_common(*sub, f);

  sweep->add_option("--U-values", f.U_values, "explicit U/J list");
  sweep->add_option("--tau-values", f.tau_values, "explicit tau*J list");
  sweep->add_option("--kT-values", f.kT_values, "kT/J list (default 0.2 2 20)");
  sweep->add_option("--protocols", f.protocols, "protocol list (default exact)");
  sweep->add_option("--U-points", f.U_points, "number of U values from 0 to --U-max (default 40)");
  sweep->add_option("--U-max", f.U_max, "largest U/J (default 10)");
  sweep->add_option("--tau-points", f.tau_points, "number of tau values (default 40)");
  sweep->add_option("--tau-min", f.tau_min, "smallest tau*J (default 0.1)");
  sweep->add_option("--tau-max", f.tau_max, "largest tau*J (default 10)");
  sweep->add_flag("--no-timing", f.no_timing, "write wall_ms as 0 for byte-reproducible output");

  pops->add_option("--kT-min", f.kT_min, "smallest kT/J (default 1e-3)");
  pops->add_option("--kT-max", f.kT_max, "largest kT/J (default 1e6)");
  pops->add_option("--kT-points", f.kT_points, "log-spaced temperatures (default 91)");

  trace->add_option("--dump-iterations", f.dump_iterations,
                    "also write n1(t) of every iteration (iteration,t,n1)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    bool protocol_given = false;
    const RunConfig cfg = resolve(f, protocol_given);
    if (point->parsed()) return cmd_point(cfg, out);
    if (sweep->parsed()) return cmd_sweep(cfg, out, err);
    if (pops->parsed()) return cmd_populations(cfg, out);
    if (traj->parsed()) return cmd_trajectory(cfg, out);
    if (wdist->parsed()) return cmd_workdist(cfg, out);
    return cmd_scf_trace(cfg, protocol_given, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace dimerwork::cli
