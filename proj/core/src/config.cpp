#include "kinex/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kinex/errors.hpp"

namespace kinex {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    const auto item = trim(s.substr(start, end - start));
    if (item.empty()) throw ConfigError("empty item in list '" + std::string(s) + "'");
    parts.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

double parse_double(std::string_view key, std::string_view s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x))
    throw ConfigError("invalid number '" + std::string(s) + "' for " + std::string(key));
  return x;
}

int parse_int(std::string_view key, std::string_view s) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("invalid integer '" + std::string(s) + "' for " + std::string(key));
  return x;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& fmt) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out += ",";
    out += fmt(xs[k]);
  }
  return out;
}

}  // namespace

std::string_view to_string(Subcommand c) {
  switch (c) {
    case Subcommand::run: return "run";
    case Subcommand::accuracy: return "accuracy";
    case Subcommand::positivity: return "positivity";
    case Subcommand::mixed_regime: return "mixed-regime";
    case Subcommand::homogeneous: return "homogeneous";
  }
  return "unknown";
}

Subcommand parse_subcommand(std::string_view name) {
  for (auto c : {Subcommand::run, Subcommand::accuracy, Subcommand::positivity,
                 Subcommand::mixed_regime, Subcommand::homogeneous})
    if (name == to_string(c)) return c;
  throw ConfigError("unknown subcommand '" + std::string(name) + "'");
}

std::string_view to_string(InitialCondition ic) {
  return ic == InitialCondition::sod ? "sod" : "two-maxwellian";
}

InitialCondition parse_initial_condition(std::string_view name) {
  if (name == "two-maxwellian") return InitialCondition::two_maxwellian;
  if (name == "sod") return InitialCondition::sod;
  throw ConfigError("unknown initial condition '" + std::string(name) +
                    "' (expected two-maxwellian or sod)");
}

RunConfig default_config(Subcommand c) {
  RunConfig cfg;
  cfg.command = c;
  switch (c) {
    case Subcommand::run:
      break;
    case Subcommand::accuracy:
      cfg.nx = {40, 80, 160};
      cfg.nv = 0;
      cfg.cfl = 0.5;
      cfg.eps = {1.0, 1e-10};
      cfg.limiter = false;
      break;
    case Subcommand::positivity:
      cfg.initial = InitialCondition::sod;
      cfg.integrators = {IntegratorKind::exprk2, IntegratorKind::ars222};
      cfg.eps = {1.0, 1e-4, 1e-8};
      break;
    case Subcommand::mixed_regime:
      cfg.nx = {40};
      cfg.t_final = 0.5;
      break;
    case Subcommand::homogeneous:
      cfg.nx = {5};
      cfg.t_final = 10.0;
      break;
  }
  return cfg;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "model", "integrator", "transport", "initial", "nx",      "nv",     "vmax",
      "cfl",   "eps",        "eps0",      "tfinal",  "limiter", "out"};
  return keys;
}

void apply_config_value(RunConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (value.empty()) throw ConfigError("empty value for " + std::string(key));
  if (key == "model") {
    cfg.model = parse_collision_model(value);
  } else if (key == "integrator") {
    cfg.integrators.clear();
    for (auto item : split_list(value)) cfg.integrators.push_back(parse_integrator_kind(item));
  } else if (key == "transport") {
    cfg.transport = parse_transport_kind(value);
  } else if (key == "initial") {
    cfg.initial = parse_initial_condition(value);
  } else if (key == "nx") {
    cfg.nx.clear();
    for (auto item : split_list(value)) cfg.nx.push_back(parse_int(key, item));
  } else if (key == "nv") {
    cfg.nv = parse_int(key, value);
  } else if (key == "vmax") {
    cfg.vmax = parse_double(key, value);
  } else if (key == "cfl") {
    cfg.cfl = parse_double(key, value);
  } else if (key == "eps") {
    cfg.eps.clear();
    for (auto item : split_list(value)) cfg.eps.push_back(parse_double(key, item));
  } else if (key == "eps0") {
    cfg.eps0 = parse_double(key, value);
  } else if (key == "tfinal") {
    cfg.t_final = parse_double(key, value);
  } else if (key == "limiter") {
    if (value == "on") {
      cfg.limiter = true;
    } else if (value == "off") {
      cfg.limiter = false;
    } else {
      throw ConfigError("limiter must be 'on' or 'off', got '" + std::string(value) + "'");
    }
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    const auto line = trim(text.substr(pos, end - pos));
    ++line_no;
    if (!line.empty() && line.front() != '#') {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
      if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
        throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                          std::string(key) + "'");
      out[std::string(key)] = std::string(value);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void validate(const RunConfig& cfg) {
  if (cfg.nx.empty()) throw ConfigError("nx must list at least one value");
  for (int n : cfg.nx)
    if (n < 5) throw ConfigError("nx must be at least 5, got " + std::to_string(n));
  if (cfg.command == Subcommand::accuracy) {
    if (cfg.nx.size() < 2) throw ConfigError("accuracy needs at least two nx values");
    for (std::size_t k = 1; k < cfg.nx.size(); ++k)
      if (cfg.nx[k] != 2 * cfg.nx[k - 1])
        throw ConfigError("accuracy nx values must double from one to the next");
  }
  if (cfg.nv != 0 && cfg.nv < 4)
    throw ConfigError("nv must be at least 4, got " + std::to_string(cfg.nv));
  if (!(cfg.vmax > 0.0)) throw ConfigError("vmax must be positive");
  if (!(cfg.cfl > 0.0)) throw ConfigError("cfl must be positive");
  if (!(cfg.t_final >= 0.0)) throw ConfigError("tfinal must be nonnegative");
  if (cfg.eps.empty()) throw ConfigError("eps must list at least one value");
  for (double e : cfg.eps)
    if (!(e > 0.0)) throw ConfigError("eps values must be positive");
  if (!(cfg.eps0 >= 0.0)) throw ConfigError("eps0 must be nonnegative");
  if (cfg.integrators.empty()) throw ConfigError("integrator must list at least one value");
  if (cfg.model == CollisionModel::esbgk && cfg.command != Subcommand::homogeneous)
    throw ConfigError("esbgk is only available for homogeneous runs (it equals bgk in 1D)");
  if (cfg.limiter) {
    const double factor = cfg.transport == TransportKind::upwind1 ? 1.0 : 1.0 / 12.0;
    for (auto k : cfg.integrators) {
      if (k == IntegratorKind::ssprk2_explicit || k == IntegratorKind::ars222) continue;
      const auto c = coefficients_for(k);
      const double bound = factor / std::max(c.b1, c.b2);
      if (cfg.cfl > bound * (1.0 + 1e-12))
        throw ConfigError("cfl " + format_double(cfg.cfl) +
                          " exceeds the positivity bound " + format_double(bound) +
                          " (use --limiter off to run anyway)");
    }
  }
}

std::string echo_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "model = " << to_string(cfg.model) << "\n";
  os << "integrator = "
     << join(cfg.integrators, [](IntegratorKind k) { return std::string(to_string(k)); })
     << "\n";
  os << "transport = " << to_string(cfg.transport) << "\n";
  os << "initial = " << to_string(cfg.initial) << "\n";
  os << "nx = " << join(cfg.nx, [](int n) { return std::to_string(n); }) << "\n";
  os << "nv = " << cfg.nv << "\n";
  os << "vmax = " << format_double(cfg.vmax) << "\n";
  os << "cfl = " << format_double(cfg.cfl) << "\n";
  os << "eps = " << join(cfg.eps, [](double e) { return format_double(e); }) << "\n";
  os << "eps0 = " << format_double(cfg.eps0) << "\n";
  os << "tfinal = " << format_double(cfg.t_final) << "\n";
  os << "limiter = " << (cfg.limiter ? "on" : "off") << "\n";
  os << "out = " << cfg.out.string() << "\n";
  return os.str();
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace kinex
