#include "bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsrdg/qsrdg.h"

namespace qsr_dg {

namespace fs = std::filesystem;

namespace {

constexpr double kBalanceGate = 1e-8;
constexpr double kChecksGate = 1e-9;
constexpr double kTauMin = 1e-3;
constexpr int kReferenceRefinement = 8;
constexpr double kOrderLow = 1.7;
constexpr double kOrderHigh = 2.3;
constexpr int kCheckSamples = 100;
constexpr double kSampleBox = 2.0;

struct ExampleDeleter {
  void operator()(qsrdg_example* e) const { qsrdg_example_destroy(e); }
};
struct TrajectoryDeleter {
  void operator()(qsrdg_trajectory* t) const { qsrdg_trajectory_destroy(t); }
};
using ExamplePtr = std::unique_ptr<qsrdg_example, ExampleDeleter>;
using TrajectoryPtr = std::unique_ptr<qsrdg_trajectory, TrajectoryDeleter>;

// Failure carrying the exit code it maps to.
struct Failure : std::runtime_error {
  Failure(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

std::string describe(qsrdg_status status) {
  std::string msg = qsrdg_last_error_message();
  return msg.empty() ? qsrdg_status_name(status) : msg;
}

void check(qsrdg_status status, int exit_code) {
  if (status != QSRDG_OK) throw Failure(exit_code, describe(status));
}

struct Options {
  std::string example;
  std::string scheme = "dg";
  std::string dg = "gonzalez";
  int mv_order = 5;
  std::size_t q = 1000;
  double T = 10.0;
  std::string out;
  std::uint64_t seed = 20240917;
  int s_max = 5;
  bool zero_input = false;
  bool pi_two_channel = false;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::string cache_dir;
  bool no_cache = false;
  bool parallel = false;
};

unsigned example_flags(const Options& o) {
  return (o.zero_input ? QSRDG_EXAMPLE_ZERO_INPUT : 0u) |
         (o.pi_two_channel ? QSRDG_EXAMPLE_PI_TWO_CHANNEL : 0u);
}

ExamplePtr open_example(const Options& o) {
  qsrdg_example* raw = nullptr;
  check(qsrdg_example_create(o.example.c_str(), example_flags(o), &raw), kExitBadArguments);
  return ExamplePtr(raw);
}

qsrdg_config make_config(const Options& o, bool force_dg) {
  qsrdg_config cfg;
  qsrdg_config_default(&cfg);
  if (!force_dg && o.scheme == "midpoint") cfg.scheme = QSRDG_SCHEME_MIDPOINT;
  if (o.dg == "itoh-abe") cfg.dg_kind = QSRDG_DG_ITOH_ABE;
  if (o.dg == "mean-value") cfg.dg_kind = QSRDG_DG_MEAN_VALUE;
  cfg.mean_value_order = o.mv_order;
  return cfg;
}

TrajectoryPtr integrate(const qsrdg_example* ex, const qsrdg_config& cfg, double T, std::size_t q) {
  qsrdg_trajectory* raw = nullptr;
  const qsrdg_status st = qsrdg_integrate(ex, &cfg, T, q, &raw);
  if (st == QSRDG_ERR_INVALID_ARGUMENT) throw Failure(kExitBadArguments, describe(st));
  check(st, kExitIntegrationFailed);
  return TrajectoryPtr(raw);
}

std::vector<double> get_state(const qsrdg_trajectory* t, std::size_t i) {
  std::vector<double> z(qsrdg_trajectory_state_dim(t));
  check(qsrdg_trajectory_state(t, i, z.data(), z.size()), kExitIntegrationFailed);
  return z;
}

std::string column_names(const std::string& stem, std::size_t count, bool single_unindexed) {
  if (count == 1 && single_unindexed) return stem;
  std::string s;
  for (std::size_t k = 1; k <= count; ++k) s += (k > 1 ? "," : "") + stem + std::to_string(k);
  return s;
}

void append_row(std::string& buf, const std::vector<double>& values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) buf += ',';
    buf += format_number(values[k]);
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Failure(kExitBadArguments, "cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Failure(kExitBadArguments, "failed writing '" + path + "'");
}

// Writes the CSV to --out (or `out` if none) and the JSON sidecar next to it.
void emit(const Options& o, const std::string& csv, nlohmann::json meta, std::ostream& out) {
  if (o.out.empty()) {
    out << csv;
    return;
  }
  write_file(o.out, csv);
  write_file(o.out + ".json", meta.dump(2) + "\n");
}

// Summary lines go to stdout when the CSV goes to a file, else to stderr.
std::ostream& summary_stream(const Options& o, std::ostream& out, std::ostream& err) {
  return o.out.empty() ? err : out;
}

nlohmann::json base_meta(const std::string& command, const Options& o) {
  return {{"tool", "qsr-dg"},
          {"version", qsrdg_version()},
          {"command", command},
          {"example", o.example},
          {"zero_input", o.zero_input},
          {"pi_two_channel", o.pi_two_channel}};
}

void add_scheme_meta(nlohmann::json& meta, const Options& o, const qsrdg_config& cfg) {
  meta["scheme"] = cfg.scheme == QSRDG_SCHEME_DG ? "dg" : "midpoint";
  meta["dg"] = o.dg;
  if (o.dg == "mean-value") meta["mean_value_order"] = o.mv_order;
  meta["input_rule"] = "trapezoidal";
  meta["newton_tolerance"] = cfg.newton_tolerance;
  meta["max_newton_iterations"] = cfg.max_newton_iterations;
  meta["gradient_floor"] = cfg.gradient_floor;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  ExamplePtr ex = open_example(o);
  const qsrdg_config cfg = make_config(o, false);
  TrajectoryPtr traj = integrate(ex.get(), cfg, o.T, o.q);
  const qsrdg_trajectory* t = traj.get();
  const std::size_t n = qsrdg_trajectory_state_dim(t);
  const std::size_t m = qsrdg_trajectory_input_dim(t);
  const std::size_t steps = qsrdg_trajectory_steps(t);

  std::string csv = "t," + column_names("z", n, false) + "," + column_names("ubar", m, true) + "," +
                    column_names("ybar", m, true) + ",newton_residual\n";
  double max_newton = 0.0;
  std::vector<double> u(m), y(m);
  for (std::size_t i = 0; i <= steps; ++i) {
    double ti = 0.0;
    check(qsrdg_trajectory_time(t, i, &ti), kExitIntegrationFailed);
    std::vector<double> row{ti};
    const std::vector<double> z = get_state(t, i);
    row.insert(row.end(), z.begin(), z.end());
    append_row(csv, row);
    if (i == steps) {
      csv += std::string(2 * m + 1, ',') + "\n";
      break;
    }
    double res = 0.0;
    check(qsrdg_trajectory_averaged_input(t, i, u.data(), m), kExitIntegrationFailed);
    check(qsrdg_trajectory_discrete_output(t, i, y.data(), m), kExitIntegrationFailed);
    check(qsrdg_trajectory_newton_residual(t, i, &res), kExitIntegrationFailed);
    max_newton = std::max(max_newton, res);
    std::vector<double> tail(u);
    tail.insert(tail.end(), y.begin(), y.end());
    tail.push_back(res);
    csv += ',';
    append_row(csv, tail);
    csv += '\n';
  }

  const std::vector<double> z_final = get_state(t, steps);
  const std::size_t unconverged = qsrdg_trajectory_unconverged_steps(t);
  nlohmann::json meta = base_meta("simulate", o);
  add_scheme_meta(meta, o, cfg);
  meta["q"] = o.q;
  meta["T"] = o.T;
  meta["final_state"] = z_final;
  meta["max_newton_residual"] = max_newton;
  meta["unconverged_steps"] = unconverged;
  emit(o, csv, meta, out);

  std::ostream& s = summary_stream(o, out, err);
  s << "final state:";
  for (double v : z_final) s << ' ' << format_number(v);
  s << "\nmax newton residual: " << format_number(max_newton) << "\n";
  if (unconverged) s << "warning: newton did not converge in " << unconverged << " step(s)\n";
  return kExitOk;
}

// ----------------------------------------------------------------- balance

int cmd_balance(const Options& o, std::ostream& out, std::ostream& err) {
  const double gate = std::isnan(o.threshold) ? kBalanceGate : o.threshold;
  ExamplePtr ex = open_example(o);
  const qsrdg_config cfg = make_config(o, true);
  TrajectoryPtr traj = integrate(ex.get(), cfg, o.T, o.q);
  const std::size_t steps = qsrdg_trajectory_steps(traj.get());
  std::vector<double> res(steps);
  check(qsrdg_balance_residuals(ex.get(), traj.get(), res.data(), res.size()),
        kExitIntegrationFailed);

  std::string csv = "t,balance_residual\n";
  double max_res = 0.0;
  double max_newton = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    double ti = 0.0, nr = 0.0;
    check(qsrdg_trajectory_time(traj.get(), i, &ti), kExitIntegrationFailed);
    check(qsrdg_trajectory_newton_residual(traj.get(), i, &nr), kExitIntegrationFailed);
    append_row(csv, {ti, res[i]});
    csv += '\n';
    max_res = std::max(max_res, res[i]);
    max_newton = std::max(max_newton, nr);
  }
  const bool pass = max_res <= gate;

  nlohmann::json meta = base_meta("balance", o);
  add_scheme_meta(meta, o, cfg);
  meta["q"] = o.q;
  meta["T"] = o.T;
  meta["threshold"] = gate;
  meta["max_balance_residual"] = max_res;
  meta["max_newton_residual"] = max_newton;
  meta["pass"] = pass;
  emit(o, csv, meta, out);

  std::ostream& s = summary_stream(o, out, err);
  s << "max balance residual: " << format_number(max_res) << "\n"
    << "max newton residual: " << format_number(max_newton) << "\n"
    << (pass ? "PASS" : "FAIL") << " (threshold " << format_number(gate) << ")\n";
  return pass ? kExitOk : kExitGateFailed;
}

// ------------------------------------------------------------- convergence

std::string cache_key(const Options& o, double horizon, double tau) {
  std::string key = o.example;
  if (o.zero_input) key += "+zero";
  if (o.pi_two_channel) key += "+two";
  char buf[96];
  std::snprintf(buf, sizeof buf, "_T%.17g_tau%.17g", horizon, tau);
  return key + buf + ".csv";
}

fs::path cache_directory(const Options& o) {
  if (!o.cache_dir.empty()) return o.cache_dir;
  return fs::temp_directory_path() / "qsr-dg-cache";
}

std::string states_csv(const qsrdg_trajectory* t) {
  const std::size_t n = qsrdg_trajectory_state_dim(t);
  const std::size_t steps = qsrdg_trajectory_steps(t);
  std::string csv = "t," + column_names("z", n, false) + "\n";
  for (std::size_t i = 0; i <= steps; ++i) {
    double ti = 0.0;
    check(qsrdg_trajectory_time(t, i, &ti), kExitIntegrationFailed);
    std::vector<double> row{ti};
    const std::vector<double> z = get_state(t, i);
    row.insert(row.end(), z.begin(), z.end());
    append_row(csv, row);
    csv += '\n';
  }
  return csv;
}

// Loads a cached reference if it has the expected shape.
TrajectoryPtr load_reference(const fs::path& file, std::size_t n, std::size_t steps, double horizon) {
  std::error_code ec;
  if (!fs::exists(file, ec)) return nullptr;
  CsvTable table;
  try {
    table = read_csv(file.string());
  } catch (const std::exception&) {
    return nullptr;
  }
  if (table.header.size() != n + 1 || table.rows.size() != steps + 1) return nullptr;
  std::vector<double> times, states;
  times.reserve(steps + 1);
  states.reserve((steps + 1) * n);
  for (const auto& row : table.rows) {
    if (row.size() != n + 1) return nullptr;
    times.push_back(row[0]);
    states.insert(states.end(), row.begin() + 1, row.end());
  }
  if (times.back() != horizon) return nullptr;
  qsrdg_trajectory* raw = nullptr;
  if (qsrdg_trajectory_from_states(times.data(), times.size(), states.data(), n, &raw) != QSRDG_OK)
    return nullptr;
  return TrajectoryPtr(raw);
}

TrajectoryPtr reference_solution(const Options& o, const qsrdg_example* ex, double horizon,
                                 double tau, std::size_t steps, bool& from_cache) {
  const std::size_t n = qsrdg_example_state_dim(ex);
  fs::path file;
  from_cache = false;
  if (!o.no_cache) {
    file = cache_directory(o) / cache_key(o, horizon, tau);
    if (TrajectoryPtr cached = load_reference(file, n, steps, horizon)) {
      from_cache = true;
      return cached;
    }
  }
  qsrdg_config cfg;
  qsrdg_config_default(&cfg);
  cfg.scheme = QSRDG_SCHEME_MIDPOINT;
  TrajectoryPtr ref = integrate(ex, cfg, horizon, steps);
  if (!o.no_cache) {
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
    const fs::path tmp = file.string() + ".tmp" + std::to_string(std::random_device{}());
    try {
      write_file(tmp.string(), states_csv(ref.get()));
      fs::rename(tmp, file, ec);
    } catch (const Failure&) {
      // Caching is best effort.
    }
    fs::remove(tmp, ec);
  }
  return ref;
}

struct ConvergenceRun {
  int s = 0;
  double tau = 0.0;
  double rel_error = 0.0;
  qsrdg_status status = QSRDG_OK;
  std::string message;
};

ConvergenceRun run_stepsize(const qsrdg_example* ex, const qsrdg_config& cfg,
                            const qsrdg_trajectory* ref, int s, double horizon, std::size_t steps) {
  ConvergenceRun r;
  r.s = s;
  r.tau = std::ldexp(kTauMin, s);
  qsrdg_trajectory* raw = nullptr;
  r.status = qsrdg_integrate(ex, &cfg, horizon, steps, &raw);
  TrajectoryPtr traj(raw);
  if (r.status == QSRDG_OK) r.status = qsrdg_relative_error(traj.get(), ref, &r.rel_error);
  if (r.status != QSRDG_OK) r.message = describe(r.status);
  return r;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

int cmd_convergence(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.s_max < 2) throw Failure(kExitBadArguments, "--s-max must be >= 2");
  ExamplePtr ex = open_example(o);
  const qsrdg_config cfg = make_config(o, false);

  // The horizon is the largest multiple of the coarsest stepsize not beyond T,
  // so that every tested grid is a subgrid of the reference grid.
  const double tau_max = std::ldexp(kTauMin, o.s_max);
  const auto coarse_steps = static_cast<std::size_t>(std::floor(o.T / tau_max * (1.0 + 1e-12)));
  if (coarse_steps == 0)
    throw Failure(kExitGridsDoNotNest, "T is shorter than the coarsest stepsize");
  const double horizon = static_cast<double>(coarse_steps) * tau_max;
  const double tau_ref = kTauMin / kReferenceRefinement;
  const std::size_t ref_steps = coarse_steps * (std::size_t{1} << o.s_max) * kReferenceRefinement;

  bool from_cache = false;
  TrajectoryPtr ref = reference_solution(o, ex.get(), horizon, tau_ref, ref_steps, from_cache);

  std::vector<ConvergenceRun> runs;
  auto steps_for = [&](int s) { return coarse_steps * (std::size_t{1} << (o.s_max - s)); };
  if (o.parallel) {
    std::vector<std::future<ConvergenceRun>> jobs;
    for (int s = o.s_max; s >= 0; --s)
      jobs.push_back(std::async(std::launch::async, run_stepsize, ex.get(), cfg, ref.get(), s,
                                horizon, steps_for(s)));
    for (auto& j : jobs) runs.push_back(j.get());
  } else {
    for (int s = o.s_max; s >= 0; --s)
      runs.push_back(run_stepsize(ex.get(), cfg, ref.get(), s, horizon, steps_for(s)));
  }
  std::sort(runs.begin(), runs.end(),
            [](const ConvergenceRun& a, const ConvergenceRun& b) { return a.tau > b.tau; });
  for (const auto& r : runs) {
    if (r.status == QSRDG_ERR_GRID_MISMATCH) throw Failure(kExitGridsDoNotNest, r.message);
    if (r.status != QSRDG_OK)
      throw Failure(kExitIntegrationFailed, "tau = " + format_number(r.tau) + ": " + r.message);
  }

  std::string csv = "tau,rel_error,observed_order\n";
  std::vector<double> orders;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    csv += format_number(runs[k].tau) + "," + format_number(runs[k].rel_error) + ",";
    if (k > 0) {
      orders.push_back(std::log2(runs[k - 1].rel_error / runs[k].rel_error));
      csv += format_number(orders.back());
    }
    csv += '\n';
  }
  const std::vector<double> finest(orders.end() - 3, orders.end());
  const double med = median(finest);
  const bool pass = med >= kOrderLow && med <= kOrderHigh;

  nlohmann::json meta = base_meta("convergence", o);
  add_scheme_meta(meta, o, cfg);
  meta["T_requested"] = o.T;
  meta["horizon"] = horizon;
  meta["s_max"] = o.s_max;
  meta["tau_min"] = kTauMin;
  meta["reference"] = {{"scheme", "midpoint"},
                       {"tau", tau_ref},
                       {"steps", ref_steps},
                       {"from_cache", from_cache}};
  meta["median_order_finest_pairs"] = med;
  meta["pass"] = pass;
  emit(o, csv, meta, out);

  std::ostream& s = summary_stream(o, out, err);
  s << "horizon: " << format_number(horizon) << (from_cache ? " (cached reference)" : "") << "\n"
    << "median observed order (three finest pairs): " << format_number(med) << "\n"
    << (pass ? "PASS" : "FAIL") << " (accepted range [" << kOrderLow << ", " << kOrderHigh
    << "])\n";
  return pass ? kExitOk : kExitGateFailed;
}

// ------------------------------------------------------------------ checks

int cmd_checks(const Options& o, std::ostream& out, std::ostream& err) {
  const double gate = std::isnan(o.threshold) ? kChecksGate : o.threshold;
  ExamplePtr ex = open_example(o);
  const std::size_t n = qsrdg_example_state_dim(ex.get());
  const std::size_t m = qsrdg_example_input_dim(ex.get());
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> box(-kSampleBox, kSampleBox);

  double r[3] = {0.0, 0.0, 0.0};
  double balance = 0.0;
  std::vector<double> z(n), u(m);
  for (int k = 0; k < kCheckSamples; ++k) {
    for (double& v : z) v = box(rng);
    for (double& v : u) v = box(rng);
    double hm[3];
    check(qsrdg_example_hill_moylan(ex.get(), z.data(), n, hm), kExitIntegrationFailed);
    for (int j = 0; j < 3; ++j) r[j] = std::max(r[j], hm[j]);
    double pb = 0.0;
    check(qsrdg_example_power_balance_residual(ex.get(), z.data(), n, u.data(), m, &pb),
          kExitIntegrationFailed);
    balance = std::max(balance, pb);
  }
  const bool pass = r[0] <= gate && r[1] <= gate && r[2] <= gate && balance <= gate;

  std::string csv = "check,max_residual\n";
  const char* names[4] = {"r1", "r2", "r3", "power_balance"};
  const double values[4] = {r[0], r[1], r[2], balance};
  for (int j = 0; j < 4; ++j) csv += std::string(names[j]) + "," + format_number(values[j]) + "\n";
  if (!o.out.empty()) {
    nlohmann::json meta = base_meta("checks", o);
    meta["seed"] = o.seed;
    meta["samples"] = kCheckSamples;
    meta["box"] = kSampleBox;
    meta["threshold"] = gate;
    meta["pass"] = pass;
    emit(o, csv, meta, out);
  }
  for (int j = 0; j < 4; ++j) out << "max " << names[j] << ": " << format_number(values[j]) << "\n";
  out << (pass ? "PASS" : "FAIL") << " (threshold " << format_number(gate) << ")\n";
  (void)err;
  return pass ? kExitOk : kExitGateFailed;
}

// --------------------------------------------------------------------- cli

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--example", o.example, "pendulum, lti-ocp, pi or synthetic")->required();
  cmd->add_flag("--zero-input", o.zero_input, "Use u = 0 instead of the benchmark control");
  cmd->add_flag("--pi-two-channel", o.pi_two_channel, "Two-channel PI controller");
}

void add_grid(CLI::App* cmd, Options& o) {
  cmd->add_option("--q", o.q, "Number of time steps")->check(CLI::PositiveNumber);
  cmd->add_option("--T", o.T, "Final time")->check(CLI::PositiveNumber);
}

void add_scheme(CLI::App* cmd, Options& o, bool with_midpoint) {
  if (with_midpoint)
    cmd->add_option("--scheme", o.scheme, "dg or midpoint")
        ->check(CLI::IsMember({"dg", "midpoint"}));
  cmd->add_option("--dg", o.dg, "Discrete gradient")
      ->check(CLI::IsMember({"gonzalez", "itoh-abe", "mean-value"}));
  cmd->add_option("--mv-order", o.mv_order, "Quadrature order of the mean-value gradient")
      ->check(CLI::Range(1, 10));
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(f, line)) throw std::runtime_error("'" + path + "' is empty");
  table.header = split(line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      if (cell.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::runtime_error("bad number '" + cell + "' in " + path);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Structure-preserving integration of QSR-dissipative systems", "qsr-dg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qsrdg_version()));

  CLI::App* simulate = app.add_subcommand("simulate", "Integrate and write the trajectory");
  add_common(simulate, o);
  add_grid(simulate, o);
  add_scheme(simulate, o, true);
  simulate->add_option("--out", o.out, "CSV output path (stdout if omitted)");

  CLI::App* balance = app.add_subcommand("balance", "Discrete power-balance defect per step");
  add_common(balance, o);
  add_grid(balance, o);
  add_scheme(balance, o, false);
  balance->add_option("--out", o.out, "CSV output path (stdout if omitted)");
  balance->add_option("--threshold", o.threshold, "Gate on the maximum defect (default 1e-8)")
      ->check(CLI::NonNegativeNumber);

  CLI::App* convergence = app.add_subcommand("convergence", "Observed order against a reference");
  add_common(convergence, o);
  add_scheme(convergence, o, true);
  convergence->add_option("--T", o.T, "Requested final time")->check(CLI::PositiveNumber);
  convergence->add_option("--s-max", o.s_max, "Coarsest stepsize is 2^s_max * 1e-3")
      ->check(CLI::Range(2, 20));
  convergence->add_option("--out", o.out, "CSV output path (stdout if omitted)");
  convergence->add_option("--cache-dir", o.cache_dir, "Reference cache directory");
  convergence->add_flag("--no-cache", o.no_cache, "Do not read or write cached references");
  convergence->add_flag("--parallel", o.parallel, "Run the stepsizes concurrently");

  CLI::App* checks = app.add_subcommand("checks", "Hill-Moylan and power-balance identities");
  add_common(checks, o);
  checks->add_option("--seed", o.seed, "Sampling seed");
  checks->add_option("--out", o.out, "CSV output path");
  checks->add_option("--threshold", o.threshold, "Gate on all residuals (default 1e-9)")
      ->check(CLI::NonNegativeNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadArguments;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out, err);
    if (balance->parsed()) return cmd_balance(o, out, err);
    if (convergence->parsed()) return cmd_convergence(o, out, err);
    return cmd_checks(o, out, err);
  } catch (const Failure& f) {
    err << "qsr-dg: " << f.what() << "\n";
    if (f.code == kExitBadArguments) err << "Run with --help for usage.\n";
    return f.code;
  } catch (const std::exception& e) {
    err << "qsr-dg: " << e.what() << "\n";
    return kExitIntegrationFailed;
  }
}

}  // namespace qsr_dg
