#include "wbplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "wbplan/error.hpp"

namespace wbplan {

SearchLimits Scenario::effectiveSearchLimits() const {
  SearchLimits s = search;
  s.v_max = limits.v_max;
  s.a_max = limits.a_max;
  s.w_max = limits.w_max;
  s.rho = weights.rho;
  return s;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string& value) {
  std::istringstream ss(value);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    out.push_back(v);
  }
  return out;
}

double number(const std::string& value) {
  const auto v = numbers(value);
  if (v.size() != 1) throw std::invalid_argument(value);
  return v[0];
}

SearchState state(const std::string& value) {
  const auto v = numbers(value);
  if (v.size() != 3 && v.size() != 5) throw std::invalid_argument(value);
  SearchState s{v[0], v[1], v[2], 0.0, 0.0};
  if (v.size() == 5) {
    s.vx = v[3];
    s.vy = v[4];
  }
  return s;
}

}  // namespace

Scenario parseScenario(std::istream& in, const std::filesystem::path& base_dir) {
  Scenario sc;
  using Setter = std::function<void(const std::string&)>;
  auto real = [](double& field) { return Setter([&field](const std::string& v) { field = number(v); }); };
  auto integer = [](int& field) {
    return Setter([&field](const std::string& v) {
      const double d = number(v);
      if (d != std::floor(d)) throw std::invalid_argument(v);
      field = static_cast<int>(d);
    });
  };
  const double deg = std::numbers::pi / 180.0;

  const std::map<std::string, Setter> setters{
      {"name", [&](const std::string& v) { sc.name = v; }},
      {"map", [&](const std::string& v) { sc.map_path = base_dir / v; }},
      {"robot.length", real(sc.shape.length)},
      {"robot.width", real(sc.shape.width)},
      {"robot.edge_samples", integer(sc.shape.edge_samples_per_side)},
      {"start", [&](const std::string& v) { sc.start = state(v); }},
      {"goal", [&](const std::string& v) { sc.goal = state(v); }},
      {"limits.v_max", real(sc.limits.v_max)},
      {"limits.a_max", real(sc.limits.a_max)},
      {"limits.w_max", real(sc.limits.w_max)},
      {"search.tau", real(sc.search.tau)},
      {"search.r", integer(sc.search.r)},
      {"search.p", integer(sc.search.p)},
      {"search.lambda_t", real(sc.search.lambda_t)},
      {"search.n_checks", integer(sc.search_options.n_checks)},
      {"search.xy_resolution", real(sc.search_options.xy_resolution)},
      {"search.yaw_resolution_deg",
       [&](const std::string& v) { sc.search_options.yaw_resolution = number(v) * deg; }},
      {"search.goal_speed_tolerance", real(sc.search_options.goal_speed_tolerance)},
      {"search.node_budget",
       [&](const std::string& v) {
         const double d = number(v);
         if (d < 1 || d != std::floor(d)) throw std::invalid_argument(v);
         sc.search_options.node_budget = static_cast<std::size_t>(d);
       }},
      {"corridor.spacing", real(sc.corridor.spacing)},
      {"corridor.step", real(sc.corridor.step)},
      {"corridor.max_expand", real(sc.corridor.max_expand)},
      {"weights.rho", real(sc.weights.rho)},
      {"weights.w_v", real(sc.weights.w_v)},
      {"weights.w_a", real(sc.weights.w_a)},
      {"weights.w_w", real(sc.weights.w_w)},
      {"weights.w_p", real(sc.weights.w_p)},
      {"weights.delta_t", real(sc.weights.delta_t)},
      {"weights.mu", real(sc.weights.mu)},
      {"optimizer.max_iterations", integer(sc.optimizer.lbfgs.max_iterations)},
      {"optimizer.memory", integer(sc.optimizer.lbfgs.memory)},
      {"optimizer.g_epsilon", real(sc.optimizer.lbfgs.g_epsilon)},
      {"optimizer.max_escalations", integer(sc.optimizer.max_escalations)},
      {"optimizer.min_seed_time", real(sc.optimizer.min_seed_time)},
      {"output.sample_dt", real(sc.sample_dt)},
      {"output.jerk_dt", real(sc.jerk_dt)},
      {"output.footprint_interval", real(sc.footprint_interval)},
      {"repeat", integer(sc.repeat)},
  };

  std::string line;
  std::size_t line_no = 0, offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, line_offset);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError("unknown key '" + key + "'", line_no, line_offset);
    try {
      it->second(value);
    } catch (const std::exception&) {
      throw ParseError("bad value for '" + key + "'", line_no, line_offset);
    }
  }
  if (sc.map_path.empty()) throw ParseError("scenario has no 'map' entry", line_no, offset);
  sc.shape.validate();
  if (!(sc.limits.v_max > 0.0 && sc.limits.a_max > 0.0 && sc.limits.w_max > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "scenario limits must be positive");
  }
  if (sc.repeat < 1) sc.repeat = 1;
  return sc;
}

Scenario loadScenarioFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open scenario " + path.string());
  Scenario sc = parseScenario(in, path.parent_path());
  if (sc.name == "scenario") sc.name = path.stem().string();
  return sc;
}

}  // namespace wbplan
