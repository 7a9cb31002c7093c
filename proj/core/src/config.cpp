#include "uavmob/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace uavmob::config {
namespace {

using scenario::ScenarioConfig;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument(fmt::format("'{}' is not a finite number", v));
  }
  return out;
}

std::uint64_t to_uint(std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw std::invalid_argument(fmt::format("'{}' is not a non-negative integer", v));
  }
  return out;
}

bool to_bool(std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument(fmt::format("'{}' is not a boolean (true/false)", v));
}

double positive(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("must be > 0");
  return x;
}

double non_negative(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("must be >= 0");
  return x;
}

std::vector<UavPosition> to_positions(std::string_view v) {
  std::vector<UavPosition> out;
  std::size_t start = 0;
  const std::string text(v);
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    const std::string_view item = trim(std::string_view(text).substr(start, end - start));
    if (!item.empty()) {
      std::vector<double> xyz;
      std::size_t s = 0;
      while (s <= item.size()) {
        const std::size_t e = std::min(item.find(',', s), item.size());
        xyz.push_back(to_double(item.substr(s, e - s)));
        s = e + 1;
      }
      if (xyz.size() != 3 || xyz[2] < 0.0) throw std::invalid_argument("positions are 'x,y,h; x,y,h; ...' with h >= 0");
      out.push_back({xyz[0], xyz[1], xyz[2]});
    }
    start = end + 1;
  }
  if (out.empty()) throw std::invalid_argument("no positions given");
  return out;
}

struct Pending {
  std::vector<std::int64_t> capacity;  // one value applies to every UAV
};

std::vector<std::int64_t> to_capacities(std::string_view v) {
  std::vector<std::int64_t> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(static_cast<std::int64_t>(to_uint(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

using Setter = std::function<void(std::string_view, ParsedConfig&, Pending&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"seed", [](auto v, ParsedConfig& c, Pending&) { c.scenario.seed = to_uint(v); c.has_seed = true; }},
      {"width", [](auto v, ParsedConfig& c, Pending&) { c.scenario.width = positive(to_double(v)); }},
      {"height", [](auto v, ParsedConfig& c, Pending&) { c.scenario.height = positive(to_double(v)); }},
      {"num_devices", [](auto v, ParsedConfig& c, Pending&) {
         c.scenario.num_devices = to_uint(v);
         if (c.scenario.num_devices < 1) throw std::invalid_argument("must be >= 1");
       }},
      {"num_uavs", [](auto v, ParsedConfig& c, Pending&) {
         c.scenario.num_uavs = to_uint(v);
         if (c.scenario.num_uavs < 1) throw std::invalid_argument("must be >= 1");
       }},
      {"capacity", [](auto v, ParsedConfig&, Pending& p) { p.capacity = to_capacities(v); }},
      {"time_steps", [](auto v, ParsedConfig& c, Pending&) {
         c.scenario.time_steps = to_uint(v);
         if (c.scenario.time_steps < 1) throw std::invalid_argument("must be >= 1");
       }},
      {"sigma", [](auto v, ParsedConfig& c, Pending&) { c.scenario.sigma = non_negative(to_double(v)); }},
      {"psi", [](auto v, ParsedConfig& c, Pending&) { c.scenario.channel.psi = positive(to_double(v)); }},
      {"beta", [](auto v, ParsedConfig& c, Pending&) { c.scenario.channel.beta = positive(to_double(v)); }},
      {"f_c", [](auto v, ParsedConfig& c, Pending&) { c.scenario.channel.f_c = positive(to_double(v)); }},
      {"alpha", [](auto v, ParsedConfig& c, Pending&) { c.scenario.channel.alpha = positive(to_double(v)); }},
      {"eta", [](auto v, ParsedConfig& c, Pending&) { c.scenario.channel.eta = to_double(v); }},
      {"epsilon", [](auto v, ParsedConfig& c, Pending&) {
         const double e = to_double(v);
         if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("must lie in (0, 1)");
         c.scenario.channel.epsilon = e;
       }},
      {"delta", [](auto v, ParsedConfig& c, Pending&) {
         const double d = to_double(v);
         if (!(d > 0.0 && d <= 0.5)) throw std::invalid_argument("must lie in (0, 0.5]");
         c.scenario.link.delta = d;
       }},
      {"R_b", [](auto v, ParsedConfig& c, Pending&) { c.scenario.link.R_b = positive(to_double(v)); }},
      {"N_o", [](auto v, ParsedConfig& c, Pending&) { c.scenario.link.N_o = positive(to_double(v)); }},
      {"N_o_dBm_Hz", [](auto v, ParsedConfig& c, Pending&) {
         c.scenario.link.N_o = std::pow(10.0, (to_double(v) - 30.0) / 10.0);
       }},
      {"B", [](auto v, ParsedConfig& c, Pending&) { c.scenario.link.B = positive(to_double(v)); }},
      {"v", [](auto v, ParsedConfig& c, Pending&) { c.scenario.energy.speed = positive(to_double(v)); }},
      {"energy_a", [](auto v, ParsedConfig& c, Pending&) { c.scenario.energy.a = to_double(v); }},
      {"energy_b", [](auto v, ParsedConfig& c, Pending&) { c.scenario.energy.b = to_double(v); }},
      {"energy_c0", [](auto v, ParsedConfig& c, Pending&) { c.scenario.energy.c0 = to_double(v); }},
      {"horizontal_only", [](auto v, ParsedConfig& c, Pending&) { c.scenario.energy.horizontal_only = to_bool(v); }},
      {"h_min", [](auto v, ParsedConfig& c, Pending&) { c.scenario.min_altitude = non_negative(to_double(v)); }},
      {"tolerance", [](auto v, ParsedConfig& c, Pending&) { c.scenario.tolerance = positive(to_double(v)); }},
      {"max_iterations", [](auto v, ParsedConfig& c, Pending&) {
         const auto n = to_uint(v);
         if (n < 1 || n > 1000000) throw std::invalid_argument("must lie in [1, 1000000]");
         c.scenario.max_iterations = static_cast<int>(n);
       }},
      {"restarts", [](auto v, ParsedConfig& c, Pending&) {
         const auto n = to_uint(v);
         if (n < 1 || n > 10000) throw std::invalid_argument("must lie in [1, 10000]");
         c.scenario.restarts = static_cast<std::size_t>(n);
       }},
      {"seeding", [](auto v, ParsedConfig& c, Pending&) {
         if (trim(v) != "kmeans++") throw std::invalid_argument("only 'kmeans++' is supported");
         c.scenario.seeding = clustering::Seeding::kKMeansPlusPlus;
       }},
      {"baseline_altitude", [](auto v, ParsedConfig& c, Pending&) { c.scenario.baseline_altitude = positive(to_double(v)); }},
      {"baseline_capacity", [](auto v, ParsedConfig& c, Pending&) { c.scenario.baseline_capacity = to_bool(v); }},
      {"reps", [](auto v, ParsedConfig& c, Pending&) {
         c.scenario.reps = to_uint(v);
         if (c.scenario.reps < 1) throw std::invalid_argument("must be >= 1");
       }},
      {"initial_uavs", [](auto v, ParsedConfig& c, Pending&) { c.scenario.initial_uavs = to_positions(v); }},
  };
  return table;
}

}  // namespace

ParsedConfig parse_config_text(std::string_view text) {
  ParsedConfig parsed;
  Pending pending;
  std::set<std::string, std::less<>> seen;
  std::map<std::string, std::size_t> line_of;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no), line_no, "");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key), line_no, key);
    }
    if (!seen.insert(key).second) {
      throw ConfigError(fmt::format("line {}: key '{}' given twice", line_no, key), line_no, key);
    }
    try {
      it->second(value, parsed, pending);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("line {}: {}: {}", line_no, key, e.what()), line_no, key);
    }
    line_of[key] = line_no;
  }

  auto& cfg = parsed.scenario;
  if (pending.capacity.size() == 1) {
    cfg.capacities.assign(cfg.num_uavs, pending.capacity.front());
  } else {
    cfg.capacities = pending.capacity;
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    // Name the most likely key for cross-field violations.
    std::string key;
    const std::string msg = e.what();
    for (const auto& [k, _] : setters()) {
      if (msg.find(k) != std::string::npos && k.size() > key.size()) key = k;
    }
    const std::size_t line = line_of.count(key) ? line_of[key] : 0;
    throw ConfigError(fmt::format("invalid configuration{}: {}", key.empty() ? "" : " (" + key + ")", msg), line, key);
  }
  return parsed;
}

ParsedConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()), 0, "");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string format_config(const ScenarioConfig& c) {
  std::string out;
  auto put = [&](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
  put("seed", c.seed);
  put("width", c.width);
  put("height", c.height);
  put("num_devices", c.num_devices);
  put("num_uavs", c.num_uavs);
  const auto caps = c.resolved_capacities();
  const bool uniform = std::all_of(caps.begin(), caps.end(), [&](auto x) { return x == caps.front(); });
  if (uniform) {
    put("capacity", caps.front());
  } else {
    put("capacity", fmt::format("{}", fmt::join(caps, ",")));
  }
  put("time_steps", c.time_steps);
  put("sigma", c.sigma);
  put("psi", c.channel.psi);
  put("beta", c.channel.beta);
  put("f_c", c.channel.f_c);
  put("alpha", c.channel.alpha);
  put("eta", c.channel.eta);
  put("epsilon", c.channel.epsilon);
  put("delta", c.link.delta);
  put("R_b", c.link.R_b);
  put("N_o", c.link.N_o);
  put("B", c.link.B);
  put("v", c.energy.speed);
  put("energy_a", c.energy.a);
  put("energy_b", c.energy.b);
  put("energy_c0", c.energy.c0);
  put("horizontal_only", c.energy.horizontal_only);
  put("h_min", c.min_altitude);
  put("tolerance", c.tolerance);
  put("max_iterations", c.max_iterations);
  put("restarts", c.restarts);
  put("seeding", "kmeans++");
  put("baseline_altitude", c.baseline_altitude);
  put("baseline_capacity", c.baseline_capacity);
  put("reps", c.reps);
  if (c.initial_uavs) {
    std::string positions;
    for (const auto& p : *c.initial_uavs) {
      if (!positions.empty()) positions += "; ";
      positions += fmt::format("{},{},{}", p.x, p.y, p.h);
    }
    put("initial_uavs", positions);
  }
  return out;
}

std::map<std::string, std::string> read_manifest_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open manifest '{}'", path.string()));
  std::map<std::string, std::string> meta;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view v = trim(line);
    if (v.empty() || v.front() != '#') continue;
    v = trim(v.substr(1));
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) continue;
    meta.emplace(std::string(trim(v.substr(0, eq))), std::string(trim(v.substr(eq + 1))));
  }
  return meta;
}

}  // namespace uavmob::config
