#include "memsq/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "memsq/quench.hpp"
#include "memsq/steady.hpp"

namespace memsq {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
  return x;
}

long parse_int(const std::string& key, const std::string& v) {
  long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
  return x;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  const long x = parse_int(key, v);
  if (x < 0) throw ConfigError(key + " must be nonnegative");
  return static_cast<std::size_t>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

Mode parse_mode(const std::string& v) {
  static const std::map<std::string, Mode> modes{
      {"bifurcate", Mode::Bifurcate}, {"bounds", Mode::Bounds}, {"simulate", Mode::Simulate},
      {"quench", Mode::Quench},       {"eigen", Mode::Eigen},   {"sweep", Mode::Sweep}};
  const auto it = modes.find(v);
  if (it == modes.end()) throw ConfigError("unknown mode '" + v + "'");
  return it->second;
}

const std::set<std::string> kSweepParameters{"lambda", "alpha", "beta", "dim", "radius"};

void set_parameter(RunConfig& cfg, const std::string& name, double value) {
  if (name == "lambda") {
    cfg.params.lambda = value;
  } else if (name == "alpha") {
    cfg.params.alpha = value;
  } else if (name == "beta") {
    cfg.params.beta = value;
  } else if (name == "dim") {
    if (value != std::floor(value)) throw ConfigError("dim must be an integer");
    cfg.params.dim = static_cast<int>(value);
  } else if (name == "radius") {
    if (!cfg.params.geometry.is_ball()) throw ConfigError("radius only applies to ball geometry");
    cfg.params.geometry.radius = value;
  } else {
    throw ConfigError("unknown sweep parameter '" + name + "'");
  }
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Bifurcate: return "bifurcate";
    case Mode::Bounds: return "bounds";
    case Mode::Simulate: return "simulate";
    case Mode::Quench: return "quench";
    case Mode::Eigen: return "eigen";
    case Mode::Sweep: return "sweep";
  }
  return "simulate";
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::optional<std::string> geometry;
  std::optional<double> radius;
  bool have_mode = false;
  SweepAxis sweep;
  bool have_sweep = false;
  bool have_values = false;
  bool have_parameter = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "mode" && section != "params" && section != "scheme" && section != "sweep") {
        throw ConfigError(where + "unknown section [" + section + "]");
      }
      if (section == "sweep") have_sweep = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + "key outside of a section");
    if (key.empty() || value.empty()) throw ConfigError(where + "empty key or value");
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) throw ConfigError(where + "duplicate key " + full);

    if (section == "mode") {
      if (key != "mode") throw ConfigError(where + "unknown key " + full);
      cfg.mode = parse_mode(value);
      have_mode = true;
    } else if (section == "params") {
      if (key == "lambda") cfg.params.lambda = parse_double(full, value);
      else if (key == "alpha") cfg.params.alpha = parse_double(full, value);
      else if (key == "beta") cfg.params.beta = parse_double(full, value);
      else if (key == "dim") cfg.params.dim = static_cast<int>(parse_int(full, value));
      else if (key == "geometry") geometry = value;
      else if (key == "radius") radius = parse_double(full, value);
      else throw ConfigError(where + "unknown key " + full);
    } else if (section == "scheme") {
      auto& s = cfg.scheme;
      if (key == "epsilon") s.epsilon = parse_double(full, value);
      else if (key == "dtau") s.dtau = parse_double(full, value);
      else if (key == "dtau_max") s.dtau_max = parse_double(full, value);
      else if (key == "monitor_floor") s.monitor_floor = parse_double(full, value);
      else if (key == "quench_guard") s.quench_guard = parse_double(full, value);
      else if (key == "steady_tol") s.steady_tol = parse_double(full, value);
      else if (key == "t_final") s.t_final = parse_double(full, value);
      else if (key == "max_relative_change") s.max_relative_change = parse_double(full, value);
      else if (key == "smooth_monitor") s.smooth_monitor = parse_bool(full, value);
      else if (key == "freeze_mesh") s.freeze_mesh = parse_bool(full, value);
      else if (key == "snapshot_every") s.snapshot_every = parse_count(full, value);
      else if (key == "grid") cfg.grid = parse_count(full, value);
      else if (key == "branch_min") cfg.branch_min = parse_double(full, value);
      else if (key == "branch_max") cfg.branch_max = parse_double(full, value);
      else if (key == "branch_step") cfg.branch_step = parse_double(full, value);
      else if (key == "eigen_samples") cfg.eigen_samples = parse_count(full, value);
      else throw ConfigError(where + "unknown key " + full);
    } else {
      if (key == "parameter") {
        if (!kSweepParameters.count(value)) throw ConfigError(where + "unknown sweep parameter '" + value + "'");
        sweep.parameter = value;
        have_parameter = true;
      } else if (key == "values") {
        std::istringstream items(value);
        std::string item;
        while (std::getline(items, item, ',')) sweep.values.push_back(parse_double(full, trim(item)));
        have_values = true;
      } else if (key == "run") {
        sweep.run = parse_mode(value);
        if (sweep.run == Mode::Sweep) throw ConfigError(where + "sweeps cannot nest");
      } else {
        throw ConfigError(where + "unknown key " + full);
      }
    }
  }

  if (!have_mode) throw ConfigError("missing [mode] mode = ...");
  const std::string geo = geometry.value_or("interval");
  if (geo == "ball") {
    if (!radius) throw ConfigError("ball geometry requires params.radius");
    cfg.params.geometry = Geometry::ball(*radius);
  } else if (geo == "interval") {
    if (radius) throw ConfigError("radius only applies to ball geometry");
    cfg.params.geometry = Geometry::interval();
  } else {
    throw ConfigError("unknown geometry '" + geo + "'");
  }
  if (cfg.mode == Mode::Sweep) {
    if (!have_sweep || !have_parameter || !have_values || sweep.values.empty()) {
      throw ConfigError("sweep mode requires [sweep] parameter and values");
    }
    cfg.sweep = sweep;
  } else if (have_sweep) {
    throw ConfigError("[sweep] is only allowed in sweep mode");
  }
  try {
    validate(cfg.params);
    validate(cfg.scheme);
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (cfg.grid < 8) throw ConfigError("scheme.grid must be at least 8");
  if (!(cfg.branch_min > 0.0 && cfg.branch_max < 1.0 && cfg.branch_min < cfg.branch_max &&
        cfg.branch_step > 0.0)) {
    throw ConfigError("branch grid must satisfy 0 < branch_min < branch_max < 1, branch_step > 0");
  }
  if (cfg.eigen_samples < 3) throw ConfigError("scheme.eigen_samples must be at least 3");
  return cfg;
}

std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[mode]\nmode = " << to_string(c.mode) << "\n\n[params]\n";
  o << "lambda = " << format_number(c.params.lambda) << "\n";
  o << "alpha = " << format_number(c.params.alpha) << "\n";
  o << "beta = " << format_number(c.params.beta) << "\n";
  o << "dim = " << c.params.dim << "\n";
  if (c.params.geometry.is_ball()) {
    o << "geometry = ball\nradius = " << format_number(c.params.geometry.radius) << "\n";
  } else {
    o << "geometry = interval\n";
  }
  const auto& s = c.scheme;
  o << "\n[scheme]\n";
  o << "epsilon = " << format_number(s.epsilon) << "\n";
  o << "dtau = " << format_number(s.dtau) << "\n";
  o << "dtau_max = " << format_number(s.dtau_max) << "\n";
  o << "monitor_floor = " << format_number(s.monitor_floor) << "\n";
  o << "quench_guard = " << format_number(s.quench_guard) << "\n";
  o << "steady_tol = " << format_number(s.steady_tol) << "\n";
  o << "t_final = " << format_number(s.t_final) << "\n";
  o << "max_relative_change = " << format_number(s.max_relative_change) << "\n";
  o << "smooth_monitor = " << (s.smooth_monitor ? "true" : "false") << "\n";
  o << "freeze_mesh = " << (s.freeze_mesh ? "true" : "false") << "\n";
  o << "snapshot_every = " << s.snapshot_every << "\n";
  o << "grid = " << c.grid << "\n";
  o << "branch_min = " << format_number(c.branch_min) << "\n";
  o << "branch_max = " << format_number(c.branch_max) << "\n";
  o << "branch_step = " << format_number(c.branch_step) << "\n";
  o << "eigen_samples = " << c.eigen_samples << "\n";
  if (c.sweep) {
    o << "\n[sweep]\nparameter = " << c.sweep->parameter << "\nvalues = ";
    for (std::size_t i = 0; i < c.sweep->values.size(); ++i) {
      o << (i ? ", " : "") << format_number(c.sweep->values[i]);
    }
    o << "\nrun = " << to_string(c.sweep->run) << "\n";
  }
  return o.str();
}

std::string config_echo(std::string_view manifest) {
  const std::string_view begin = "config_begin\n";
  const std::string_view end = "config_end\n";
  const auto b = manifest.find(begin);
  const auto e = manifest.rfind(end);
  if (b == std::string_view::npos || e == std::string_view::npos || e < b + begin.size()) {
    throw ConfigError("manifest has no config echo");
  }
  return std::string(manifest.substr(b + begin.size(), e - b - begin.size()));
}

// ---------------------------------------------------------------------------

namespace {

using Headline = std::vector<std::pair<std::string, std::string>>;

struct Outcome {
  int code = 0;
  std::string status = "ok";
  std::string message;
  Headline headline;
};

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw fs::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
    out_ << header << "\n";
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      out_ << (first ? "" : ",") << format_number(v);
      first = false;
    }
    out_ << "\n";
  }
  void text_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void add(Headline& h, const std::string& key, double value) { h.emplace_back(key, format_number(value)); }

Outcome run_bifurcate(const RunConfig& cfg, const fs::path& dir) {
  Outcome out;
  const auto& p = cfg.params;
  Csv branch(dir / "branch.csv", "M,m,lambda,mu");
  Csv fold(dir / "fold.csv", "kind,M,m,lambda,mu");
  auto fold_row = [&](const std::string& kind, double M, double m, double lambda, double mu) {
    fold.text_row({kind, format_number(M), format_number(m), format_number(lambda), format_number(mu)});
  };
  if (!p.geometry.is_ball()) {
    const auto grid = uniform_M_grid(cfg.branch_min, cfg.branch_max, cfg.branch_step);
    const Branch b = trace_branch(p.alpha, p.beta, grid);
    for (const auto& q : b.points) branch.row({q.M, q.m, q.lambda, q.mu});
    fold_row("grid", b.grid_fold.M, b.grid_fold.m, b.grid_fold.lambda, b.grid_fold.mu);
    fold_row("refined", b.fold.M, b.fold.m, b.fold.lambda, b.fold.mu);
    add(out.headline, "fold_lambda", b.fold.lambda);
    add(out.headline, "fold_M", b.fold.M);
    add(out.headline, "grid_fold_lambda", b.grid_fold.lambda);
    add(out.headline, "grid_fold_M", b.grid_fold.M);
    out.headline.emplace_back("fold_on_boundary", b.fold_on_boundary ? "true" : "false");
    out.headline.emplace_back("skipped_grid_values", std::to_string(b.skipped));
    return out;
  }
  const RadialBranch rb(p);
  const double R = p.geometry.radius;
  const std::vector<double> edge{R};
  for (double s = 1e-2; s < 50.0; s *= 1.02) {
    const auto q = rb.point(s);
    const double M = 1.0 - rb.profile(s, edge).front();
    branch.row({M, q.m, q.lambda, q.mu});
  }
  const auto f = rb.fold();
  const double fM = 1.0 - rb.profile(f.s, edge).front();
  fold_row("refined", fM, f.m, f.lambda, f.mu);
  add(out.headline, "fold_lambda", f.lambda);
  add(out.headline, "fold_M", fM);
  add(out.headline, "fold_s", f.s);
  return out;
}

Outcome run_bounds(const RunConfig& cfg, const fs::path& dir) {
  Outcome out;
  const auto& p = cfg.params;
  Csv csv(dir / "bounds.csv", "quantity,value,status");
  auto put = [&](const std::string& name, std::optional<double> v) {
    csv.text_row({name, v ? format_number(*v) : "nan", v ? "ok" : "vacuous"});
    if (v) add(out.headline, name, *v);
  };
  const EigenPair e = principal_eigenpair(p, cfg.eigen_samples);
  put("lambda1", e.lambda1);
  put("m1", e.m1);
  put("upper_bound_lambda_star", upper_bound_lambda_star(p));
  if (p.geometry.is_ball()) {
    put("pohozaev_lower_bound", pohozaev_lower_bound(p));
    put("radial_fold_lambda", RadialBranch(p).fold().lambda);
  } else {
    put("mu_star_lower_bound", mu_star_lower_bound(p));
    const auto grid = uniform_M_grid(cfg.branch_min, cfg.branch_max, cfg.branch_step);
    put("fold_lambda", trace_branch(p.alpha, p.beta, grid).fold.lambda);
  }
  if (!p.is_local()) {
    const MeshState mesh = MeshState::uniform(cfg.grid, p.geometry.outer());
    const std::vector<double> zero(mesh.npoints(), 0.0);
    const auto q = quench_threshold_lambda(zero, mesh.X, p);
    put("q_alpha", q.q_alpha);
    put("A_alpha", q.A_alpha);
    put("quench_threshold_lambda", q.lambda_tilde);
  }
  return out;
}

void write_snapshot(const fs::path& dir, const Snapshot& s) {
  char name[32];
  std::snprintf(name, sizeof name, "%04zu.csv", s.step);
  Csv csv(dir / name, "X,u");
  for (std::size_t i = 0; i < s.X.size(); ++i) csv.row({s.X[i], s.u[i]});
}

Outcome run_simulate(const RunConfig& cfg, const fs::path& dir, bool analyze_quench) {
  Outcome out;
  const Trajectory tr = integrate(cfg.params, cfg.scheme, cfg.grid);
  {
    Csv ledger(dir / "ledger.csv", "t,umax,E,K,g,dtau");
    for (const auto& r : tr.ledger) ledger.row({r.t, r.umax, r.E, r.K, r.g, r.dtau});
  }
  fs::create_directories(dir / "snapshots");
  for (const auto& s : tr.snapshots) write_snapshot(dir / "snapshots", s);
  out.status = to_string(tr.status);
  out.headline.emplace_back("run_status", out.status);
  add(out.headline, "t_end", tr.final_state.t);
  add(out.headline, "umax_end", tr.ledger.back().umax);
  out.headline.emplace_back("accepted_steps", std::to_string(tr.ledger.size() - 1));
  out.headline.emplace_back("rejected_steps", std::to_string(tr.rejected_steps));
  add(out.headline, "max_energy_increase", tr.ledger.size() > 1 ? max_energy_increase(tr) : 0.0);
  if (tr.status == RunStatus::Failed) throw NumericalFailure(tr.message);
  if (!analyze_quench) return out;

  Csv csv(dir / "quench.csv",
          "quenched,Tq,x_star,gamma,C,C_star,profile_residual,terminal_H,r_squared,poor_fit,"
          "fit_points,window_start,window_end");
  if (tr.status != RunStatus::Quenched) {
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    csv.row({0, inf, nan, nan, nan, nan, nan, nan, nan, 0, 0, nan, nan});
    add(out.headline, "Tq", inf);
    return out;
  }
  const QuenchReport r = analyze(tr);
  csv.row({1, r.Tq, r.x_star, r.rate_exponent, r.rate_constant, r.profile_constant,
           r.profile_residual, r.terminal_H, r.r_squared, r.poor_fit ? 1.0 : 0.0,
           static_cast<double>(r.fit_points), r.fit_window.first, r.fit_window.second});
  add(out.headline, "Tq", r.Tq);
  add(out.headline, "gamma", r.rate_exponent);
  add(out.headline, "x_star", r.x_star);
  add(out.headline, "C_star", r.profile_constant);
  return out;
}

Outcome run_eigen(const RunConfig& cfg, const fs::path& dir) {
  Outcome out;
  const EigenPair e = principal_eigenpair(cfg.params, cfg.eigen_samples);
  Csv csv(dir / "eigen.csv", "x,phi");
  for (std::size_t i = 0; i < e.x.size(); ++i) csv.row({e.x[i], e.phi[i]});
  add(out.headline, "lambda1", e.lambda1);
  add(out.headline, "m1", e.m1);
  return out;
}

void write_manifest(const fs::path& dir, const std::string& config_text, Mode mode,
                    const Outcome& o, double seconds) {
  std::ofstream m(dir / "manifest.txt");
  if (!m) throw fs::filesystem_error("cannot write", dir / "manifest.txt", std::make_error_code(std::errc::io_error));
  m << "artifact = memsq\n";
  m << "artifact_version = " << kVersion << "\n";
  m << "mode = " << to_string(mode) << "\n";
  m << "status = " << o.status << "\n";
  m << "exit_code = " << o.code << "\n";
  if (!o.message.empty()) m << "message = " << o.message << "\n";
  m << "wall_clock_seconds = " << format_number(seconds) << "\n";
  for (const auto& [k, v] : o.headline) m << "headline." << k << " = " << v << "\n";
  m << "config_begin\n" << config_text;
  if (!config_text.empty() && config_text.back() != '\n') m << "\n";
  m << "config_end\n";
}

Outcome dispatch(const RunConfig& cfg, const fs::path& dir, const RunOptions& options);

// Runs one experiment, converting exceptions into exit codes, and writes its manifest.
Outcome guarded(const RunConfig& cfg, const std::string& text, const fs::path& dir,
                const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    fs::create_directories(dir);
    o = dispatch(cfg, dir, options);
  } catch (const NumericalFailure& e) {
    o.code = 3;
    o.status = "failed";
    o.message = e.what();
  } catch (const InvalidInput& e) {
    o.code = 2;
    o.status = "invalid";
    o.message = e.what();
  } catch (const fs::filesystem_error& e) {
    o.code = 2;
    o.status = "io-error";
    o.message = e.what();
    return o;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_manifest(dir, text, cfg.mode, o, seconds);
  } catch (const fs::filesystem_error& e) {
    o.code = 2;
    o.message = e.what();
  }
  return o;
}

Outcome run_sweep(const RunConfig& cfg, const fs::path& dir, const RunOptions& options) {
  const SweepAxis& axis = *cfg.sweep;
  std::vector<RunConfig> subs;
  for (double v : axis.values) {
    RunConfig sub = cfg;
    sub.mode = axis.run;
    sub.sweep.reset();
    set_parameter(sub, axis.parameter, v);
    try {
      validate(sub.params);
    } catch (const InvalidInput& e) {
      throw ConfigError("sweep value " + format_number(v) + ": " + e.what());
    }
    subs.push_back(sub);
  }
  std::vector<Outcome> results(subs.size());
  auto sub_dir = [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu", i);
    return dir / name;
  };
  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(subs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < subs.size(); i = next++) {
      results[i] = guarded(subs[i], format_config(subs[i]), sub_dir(i), options);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  Outcome out;
  Csv summary(dir / "summary.csv", axis.parameter + ",status,exit_code,headline_key,headline_value");
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const Outcome& r = results[i];
    std::string key = "-";
    std::string value = "nan";
    for (const char* want : {"Tq", "fold_lambda", "lambda1", "t_end", "upper_bound_lambda_star"}) {
      const auto it = std::find_if(r.headline.begin(), r.headline.end(),
                                   [&](const auto& kv) { return kv.first == want; });
      if (it != r.headline.end()) {
        key = it->first;
        value = it->second;
        break;
      }
    }
    const auto st = std::find_if(r.headline.begin(), r.headline.end(),
                                 [](const auto& kv) { return kv.first == "run_status"; });
    const std::string status = r.code != 0 ? r.status : (st != r.headline.end() ? st->second : r.status);
    summary.text_row({format_number(axis.values[i]), status, std::to_string(r.code), key, value});
    if (r.code != 0) {
      out.code = std::max(out.code, r.code);
      out.status = "failed";
      if (out.message.empty()) out.message = "sub-run " + std::to_string(i) + ": " + r.message;
    }
  }
  out.headline.emplace_back("sweep_parameter", axis.parameter);
  out.headline.emplace_back("sub_runs", std::to_string(subs.size()));
  return out;
}

Outcome dispatch(const RunConfig& cfg, const fs::path& dir, const RunOptions& options) {
  switch (cfg.mode) {
    case Mode::Bifurcate: return run_bifurcate(cfg, dir);
    case Mode::Bounds: return run_bounds(cfg, dir);
    case Mode::Simulate: return run_simulate(cfg, dir, false);
    case Mode::Quench: return run_simulate(cfg, dir, true);
    case Mode::Eigen: return run_eigen(cfg, dir);
    case Mode::Sweep: return run_sweep(cfg, dir, options);
  }
  throw ConfigError("unknown mode");
}

}  // namespace

int run_text(const std::string& text, const RunOptions& options, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = parse_config(text);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  }
  const Outcome o = guarded(cfg, text, options.out, options);
  if (o.code != 0) {
    log << (o.code == 2 ? "config error: " : "numerical failure: ") << o.message << "\n";
  } else {
    log << to_string(cfg.mode) << ": " << o.status;
    for (const auto& [k, v] : o.headline) log << " " << k << "=" << v;
    log << "\n";
  }
  return o.code;
}

int run(const fs::path& config_path, const RunOptions& options, std::ostream& log) {
  std::ifstream in(config_path);
  if (!in) {
    log << "config error: cannot read " << config_path.string() << "\n";
    return 2;
  }
  std::ostringstream text;
  text << in.rdbuf();
  return run_text(text.str(), options, log);
}

}  // namespace memsq
