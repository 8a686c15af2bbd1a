#include "qreset/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include "qreset/errors.hpp"

namespace qreset {

namespace {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(int line, const std::string& msg) {
  std::ostringstream os;
  os << "config line " << line << ": " << msg;
  throw ConfigError(os.str());
}

double parse_number(std::string_view s, int line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail_at(line, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

// Strips a trailing comment that is not inside a string literal.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

Value parse_value(std::string_view raw, int line) {
  const std::string_view s = trim(raw);
  if (s.empty()) fail_at(line, "missing value");
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail_at(line, "unterminated string");
    return std::string(s.substr(1, s.size() - 2));
  }
  if (s.front() == '[') {
    if (s.back() != ']') fail_at(line, "unterminated array");
    std::vector<double> out;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      out.push_back(parse_number(body.substr(0, comma), line));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    return out;
  }
  return parse_number(s, line);
}

struct Entry {
  Value value;
  int line;
};

class Document {
 public:
  explicit Document(std::string_view text) {
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      const std::string_view line = trim(strip_comment(raw));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail_at(line_no, "malformed section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (section.empty()) fail_at(line_no, "empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail_at(line_no, "expected key = value");
      const std::string key = std::string(trim(line.substr(0, eq)));
      if (key.empty()) fail_at(line_no, "empty key");
      const std::string full = section.empty() ? key : section + "." + key;
      if (entries_.count(full)) fail_at(line_no, "duplicate key '" + full + "'");
      entries_.emplace(full, Entry{parse_value(line.substr(eq + 1), line_no), line_no});
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  // Removes and returns the entry so leftovers can be reported as unknown.
  template <class T>
  bool take(const std::string& key, T& out) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return false;
    const Entry e = it->second;
    entries_.erase(it);
    assign(key, e, out);
    return true;
  }

  void reject_leftovers() const {
    if (entries_.empty()) return;
    const auto& [key, e] = *entries_.begin();
    fail_at(e.line, "unknown key '" + key + "'");
  }

 private:
  static void assign(const std::string& key, const Entry& e, double& out) {
    if (!std::holds_alternative<double>(e.value)) fail_at(e.line, "'" + key + "' must be a number");
    out = std::get<double>(e.value);
  }
  static void assign(const std::string& key, const Entry& e, int& out) {
    double v = 0.0;
    assign(key, e, v);
    if (v != std::floor(v) || std::abs(v) > 2e9) fail_at(e.line, "'" + key + "' must be an integer");
    out = static_cast<int>(v);
  }
  static void assign(const std::string& key, const Entry& e, std::uint64_t& out) {
    double v = 0.0;
    assign(key, e, v);
    if (v != std::floor(v) || v < 0.0 || v > 9.0e15) {
      fail_at(e.line, "'" + key + "' must be a non-negative integer below 9e15");
    }
    out = static_cast<std::uint64_t>(v);
  }
  static void assign(const std::string& key, const Entry& e, bool& out) {
    if (!std::holds_alternative<bool>(e.value)) fail_at(e.line, "'" + key + "' must be true or false");
    out = std::get<bool>(e.value);
  }
  static void assign(const std::string& key, const Entry& e, std::string& out) {
    if (!std::holds_alternative<std::string>(e.value)) fail_at(e.line, "'" + key + "' must be a string");
    out = std::get<std::string>(e.value);
  }
  static void assign(const std::string& key, const Entry& e, std::vector<double>& out) {
    if (!std::holds_alternative<std::vector<double>>(e.value)) {
      fail_at(e.line, "'" + key + "' must be an array of numbers");
    }
    out = std::get<std::vector<double>>(e.value);
  }

  std::map<std::string, Entry> entries_;
};

template <class Enum>
Enum lookup(const std::map<std::string, Enum>& table, const std::string& name, const char* what) {
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError(std::string("unknown ") + what + " '" + name + "'");
  return it->second;
}

}  // namespace

const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids{"fig2a",        "fig2c",          "fig3-thermal",
                                            "fig3-resonant", "fig4-sweep",     "fig7-geometric",
                                            "robustness",   "rwa-compare"};
  return ids;
}

void ScenarioConfig::validate() const {
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(t_final > 0.0)) throw ConfigError("grid.T must be positive");
  if (n_steps < 1) throw ConfigError("grid.n_steps must be at least 1");
  if (!(krotov.lambda > 0.0)) throw ConfigError("krotov.lambda must be positive");
  if (krotov.t_ramp < 0.0 || 2.0 * krotov.t_ramp > t_final) {
    throw ConfigError("krotov.t_ramp must lie in [0, T/2]");
  }
  if (krotov.max_iterations < 0) throw ConfigError("krotov.max_iterations must be >= 0");
  if (noise.level < 0.0) throw ConfigError("noise.level must be non-negative");
  if (noise.realizations < 1) throw ConfigError("noise.realizations must be at least 1");
  if (noise.histogram_bins < 1) throw ConfigError("noise.histogram_bins must be at least 1");
  if (initial.kind == InitialKind::correlated) {
    if (initial.gamma > 0.0) throw ConfigError("initial.gamma must be <= 0");
    const double bound = correlation_bound(params);
    if (-initial.gamma > bound) {
      std::ostringstream os;
      os << "initial.gamma = " << initial.gamma << " is outside the admissible range [-" << bound
         << ", 0]";
      throw ConfigError(os.str());
    }
  }
  if (sweep.gammas.empty()) throw ConfigError("sweep.gammas must not be empty");
  if (!(sweep.resolution > 0.0)) throw ConfigError("sweep.resolution must be positive");
  if (!(sweep.t_min > 0.0) || !(sweep.t_max > sweep.t_min)) {
    throw ConfigError("sweep needs 0 < t_min < t_max");
  }
  if (!(sweep.steps_per_unit_time > 0.0)) throw ConfigError("sweep.steps_per_unit_time must be positive");
  for (double g : sweep.gammas) {
    if (g > 0.0 || -g > correlation_bound(params)) {
      std::ostringstream os;
      os << "sweep gamma " << g << " is outside the admissible range [-" << correlation_bound(params)
         << ", 0]";
      throw ConfigError(os.str());
    }
  }
  if (trajectory_stride < 1) throw ConfigError("output.trajectory_stride must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

ScenarioConfig default_config(const std::string& scenario) {
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  cfg.krotov.lambda = 0.2;
  cfg.krotov.max_iterations = 300;

  if (scenario == "fig2a" || scenario == "robustness" || scenario == "rwa-compare") {
    // defaults above: factorizing start, resonant ramp guess
  } else if (scenario == "fig2c") {
    cfg.guess.kind = GuessKind::two_plateau;
  } else if (scenario == "fig3-thermal") {
    cfg.initial.kind = InitialKind::thermal;
  } else if (scenario == "fig3-resonant") {
    cfg.params.omega_tls = 1.0;
    cfg.initial = {InitialKind::correlated, -0.19};
    cfg.guess.kind = GuessKind::zero;
  } else if (scenario == "fig7-geometric") {
    cfg.t_final = 13.0;
    cfg.n_steps = 2600;
    cfg.initial = {InitialKind::correlated, -0.09};
    cfg.guess.kind = GuessKind::delayed_resonance;
    cfg.guess.delay = 2.0;
    cfg.guess.t_ramp = 0.5;
    cfg.krotov.t_ramp = 0.25;
    cfg.krotov.lambda = 0.02;
    cfg.krotov.max_iterations = 1000;
  } else if (scenario == "fig4-sweep") {
    cfg.guess.kind = GuessKind::delayed_resonance;
    cfg.guess.delay = 2.0;
    cfg.guess.t_ramp = 0.5;
    cfg.krotov.t_ramp = 0.25;
    cfg.krotov.lambda = 0.05;
    cfg.krotov.max_iterations = 200;
  } else {
    throw ConfigError("unknown scenario '" + scenario + "'");
  }
  return cfg;
}

ScenarioConfig parse_config(std::string_view text, const std::string& scenario) {
  Document doc(text);
  std::string id = scenario;
  std::string from_file;
  if (doc.take("scenario", from_file)) {
    if (id.empty()) {
      id = from_file;
    } else if (from_file != id) {
      throw ConfigError("config is for scenario '" + from_file + "' but '" + id + "' was requested");
    }
  }
  if (id.empty()) throw ConfigError("no scenario given");
  ScenarioConfig cfg = default_config(id);

  auto& m = cfg.params;
  doc.take("model.omega_q", m.omega_q);
  doc.take("model.omega_tls", m.omega_tls);
  doc.take("model.coupling", m.coupling);
  doc.take("model.kappa", m.kappa);
  doc.take("model.beta", m.beta);
  doc.take("model.rwa", m.rwa);
  std::string name;
  if (doc.take("model.control", name)) {
    m.control = lookup<ControlAxis>({{"z", ControlAxis::z}, {"x", ControlAxis::x}}, name, "control axis");
  }

  doc.take("grid.T", cfg.t_final);
  doc.take("grid.n_steps", cfg.n_steps);

  doc.take("krotov.lambda", cfg.krotov.lambda);
  doc.take("krotov.t_ramp", cfg.krotov.t_ramp);
  doc.take("krotov.max_iterations", cfg.krotov.max_iterations);
  doc.take("krotov.stop_delta", cfg.krotov.stop_delta);

  if (doc.take("initial.kind", name)) {
    cfg.initial.kind = lookup<InitialKind>({{"factorizing", InitialKind::factorizing},
                                            {"thermal", InitialKind::thermal},
                                            {"correlated", InitialKind::correlated}},
                                           name, "initial state kind");
  }
  doc.take("initial.gamma", cfg.initial.gamma);

  if (doc.take("guess.kind", name)) {
    cfg.guess.kind = lookup<GuessKind>({{"resonant_ramp", GuessKind::resonant_ramp},
                                        {"delayed_resonance", GuessKind::delayed_resonance},
                                        {"two_plateau", GuessKind::two_plateau},
                                        {"zero", GuessKind::zero}},
                                       name, "guess kind");
  }
  doc.take("guess.t_ramp", cfg.guess.t_ramp);
  double hold = 0.0;
  if (doc.take("guess.hold", hold)) cfg.guess.hold = hold;
  doc.take("guess.delay", cfg.guess.delay);
  doc.take("guess.first_level", cfg.guess.first_level);
  doc.take("guess.switch_time", cfg.guess.switch_time);
  doc.take("guess.off_time", cfg.guess.off_time);

  if (doc.take("noise.kind", name)) {
    cfg.noise.kind = lookup<NoiseKind>({{"amplitude", NoiseKind::amplitude}, {"state", NoiseKind::state}},
                                       name, "noise kind");
  }
  doc.take("noise.level", cfg.noise.level);
  doc.take("noise.realizations", cfg.noise.realizations);
  doc.take("noise.seed", cfg.noise.seed);
  doc.take("noise.per_step", cfg.noise.per_step);
  doc.take("noise.histogram_bins", cfg.noise.histogram_bins);

  doc.take("sweep.gammas", cfg.sweep.gammas);
  doc.take("sweep.threshold", cfg.sweep.threshold);
  doc.take("sweep.t_min", cfg.sweep.t_min);
  doc.take("sweep.t_max", cfg.sweep.t_max);
  doc.take("sweep.resolution", cfg.sweep.resolution);
  doc.take("sweep.steps_per_unit_time", cfg.sweep.steps_per_unit_time);

  std::string dir;
  if (doc.take("output.dir", dir)) cfg.output_dir = dir;
  doc.take("output.trajectory_stride", cfg.trajectory_stride);
  doc.take("run.threads", cfg.threads);

  doc.reject_leftovers();
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file, const std::string& scenario) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), scenario);
}

}  // namespace qreset
