#include "acofi/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "acofi/errors.hpp"
#include "acofi/trace_io.hpp"

namespace acofi {

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError("bad numeric value '" + s + "' for " + key);
  return v;
}

long long to_int(const std::string& s, const std::string& key) {
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError("bad integer value '" + s + "' for " + key);
  return v;
}

std::vector<double> to_doubles(const std::string& s, const std::string& key,
                               std::size_t n) {
  auto toks = split_ws(s);
  if (toks.size() != n)
    throw ConfigError(key + " expects " + std::to_string(n) + " values");
  std::vector<double> out;
  for (const auto& t : toks) out.push_back(to_double(t, key));
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  cfg.world.obstacles.clear();
  bool obstacles_seen = false;

  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    std::string qual = section + "." + key;

    if (section == "world") {
      if (key == "bounds") {
        auto v = to_doubles(value, qual, 4);
        cfg.world.bounds = {v[0], v[1], v[2], v[3]};
        cfg.grid.bounds = cfg.world.bounds;
      } else if (key == "goal") {
        auto v = to_doubles(value, qual, 3);
        cfg.world.goal = {v[0], v[1], v[2]};
      } else if (key == "obstacle") {
        auto v = to_doubles(value, qual, 3);
        cfg.world.obstacles.push_back({v[0], v[1], v[2]});
        obstacles_seen = true;
      } else if (key == "spawn") {
        auto v = to_doubles(value, qual, 4);
        cfg.world.spawn_region = {v[0], v[1], v[2], v[3]};
      } else if (key == "margin_cap") {
        cfg.world.margin_cap = to_double(value, qual);
      } else {
        throw ConfigError("unknown key " + qual);
      }
    } else if (section == "dynamics") {
      if (key == "speed") cfg.dyn.v = to_double(value, qual);
      else if (key == "steer") cfg.dyn.omega = to_double(value, qual);
      else throw ConfigError("unknown key " + qual);
    } else if (section == "grid") {
      if (key == "nx") cfg.grid.nx = static_cast<int>(to_int(value, qual));
      else if (key == "ny") cfg.grid.ny = static_cast<int>(to_int(value, qual));
      else if (key == "ntheta")
        cfg.grid.ntheta = static_cast<int>(to_int(value, qual));
      else throw ConfigError("unknown key " + qual);
    } else if (section == "solver") {
      if (key == "gamma") {
        cfg.gamma = to_double(value, qual);
        cfg.filter.gamma = cfg.gamma;
      } else if (key == "tol") {
        cfg.solver_tol = to_double(value, qual);
      } else if (key == "max_iters") {
        cfg.solver_max_iters = static_cast<int>(to_int(value, qual));
      } else {
        throw ConfigError("unknown key " + qual);
      }
    } else if (section == "filter") {
      if (key == "epsilon") cfg.filter.epsilon = to_double(value, qual);
      else if (key == "alpha") cfg.filter.alpha_target = to_double(value, qual);
      else if (key == "lambda") cfg.filter.lambda = to_double(value, qual);
      else if (key == "alpha_init")
        cfg.filter.alpha_init = to_double(value, qual);
      else throw ConfigError("unknown key " + qual);
    } else if (section == "pid") {
      if (key == "kp") cfg.pid_gains.kp = to_double(value, qual);
      else if (key == "ki") cfg.pid_gains.ki = to_double(value, qual);
      else if (key == "kd") cfg.pid_gains.kd = to_double(value, qual);
      else if (key == "deadband") cfg.pid_deadband = to_double(value, qual);
      else throw ConfigError("unknown key " + qual);
    } else if (section == "experiment") {
      if (key == "runs") cfg.n_runs = static_cast<int>(to_int(value, qual));
      else if (key == "step_cap") cfg.step_cap = to_int(value, qual);
      else if (key == "goals_per_run")
        cfg.goals_per_run = static_cast<int>(to_int(value, qual));
      else if (key == "base_seed")
        cfg.base_seed = static_cast<std::uint64_t>(to_int(value, qual));
      else if (key == "reset_aci_on_respawn")
        cfg.reset_aci_on_respawn = to_int(value, qual) != 0;
      else if (key == "scenarios") {
        cfg.scenarios.clear();
        for (const auto& tok : split_ws(value)) {
          ScenarioKind kind;
          if (!parse_scenario(tok, &kind))
            throw ConfigError("unknown scenario '" + tok + "'");
          cfg.scenarios.push_back(kind);
        }
      } else if (key == "policies") {
        cfg.policies.clear();
        for (const auto& tok : split_ws(value)) {
          PolicyKind kind;
          if (!parse_policy(tok, &kind))
            throw ConfigError("unknown policy '" + tok + "'");
          cfg.policies.push_back(kind);
        }
      } else {
        throw ConfigError("unknown key " + qual);
      }
    } else {
      throw ConfigError("key outside a known section: " + qual);
    }
  }

  if (!obstacles_seen) {
    // No [world] obstacle lines: keep the defaults.
    cfg.world.obstacles = WorldConfig{}.obstacles;
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string render_experiment_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto d = [](double v) { return format_double(v); };
  out << "[world]\n";
  out << "bounds = " << d(cfg.world.bounds.min_x) << ' '
      << d(cfg.world.bounds.min_y) << ' ' << d(cfg.world.bounds.max_x) << ' '
      << d(cfg.world.bounds.max_y) << "  # min_x min_y max_x max_y, world units\n";
  out << "goal = " << d(cfg.world.goal.cx) << ' ' << d(cfg.world.goal.cy)
      << ' ' << d(cfg.world.goal.radius) << "  # cx cy radius\n";
  for (const Disc& obs : cfg.world.obstacles)
    out << "obstacle = " << d(obs.cx) << ' ' << d(obs.cy) << ' '
        << d(obs.radius) << "  # cx cy radius\n";
  out << "spawn = " << d(cfg.world.spawn_region.min_x) << ' '
      << d(cfg.world.spawn_region.min_y) << ' '
      << d(cfg.world.spawn_region.max_x) << ' '
      << d(cfg.world.spawn_region.max_y) << "\n";
  out << "margin_cap = " << d(cfg.world.margin_cap) << "  # world units\n";
  out << "\n[dynamics]\n";
  out << "speed = " << d(cfg.dyn.v) << "  # units/step\n";
  out << "steer = " << d(cfg.dyn.omega) << "  # rad/step\n";
  out << "\n[grid]\n";
  out << "nx = " << cfg.grid.nx << "\n";
  out << "ny = " << cfg.grid.ny << "\n";
  out << "ntheta = " << cfg.grid.ntheta << "\n";
  out << "\n[solver]\n";
  out << "gamma = " << d(cfg.gamma) << "\n";
  out << "tol = " << d(cfg.solver_tol) << "\n";
  out << "max_iters = " << cfg.solver_max_iters << "\n";
  out << "\n[filter]\n";
  out << "epsilon = " << d(cfg.filter.epsilon) << "\n";
  out << "alpha = " << d(cfg.filter.alpha_target) << "\n";
  out << "lambda = " << d(cfg.filter.lambda) << "\n";
  out << "alpha_init = " << d(cfg.filter.alpha_init) << "\n";
  out << "\n[pid]\n";
  out << "kp = " << d(cfg.pid_gains.kp) << "\n";
  out << "ki = " << d(cfg.pid_gains.ki) << "\n";
  out << "kd = " << d(cfg.pid_gains.kd) << "\n";
  out << "deadband = " << d(cfg.pid_deadband) << "  # rad/step\n";
  out << "\n[experiment]\n";
  out << "runs = " << cfg.n_runs << "\n";
  out << "step_cap = " << cfg.step_cap << "\n";
  out << "goals_per_run = " << cfg.goals_per_run << "\n";
  out << "base_seed = " << cfg.base_seed << "\n";
  out << "reset_aci_on_respawn = " << (cfg.reset_aci_on_respawn ? 1 : 0)
      << "\n";
  out << "scenarios =";
  for (ScenarioKind s : cfg.scenarios) out << ' ' << scenario_name(s);
  out << "\n";
  out << "policies =";
  for (PolicyKind p : cfg.policies) out << ' ' << policy_name(p);
  out << "\n";
  return out.str();
}

}  // namespace acofi
