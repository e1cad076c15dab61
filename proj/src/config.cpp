#include "tnls/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tnls {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' is not a number: " + value);
  }
  if (pos != value.size())
    throw std::invalid_argument("config: key '" + key + "' has trailing junk: " + value);
  return v;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0.0 || v != std::floor(v))
    throw std::invalid_argument("config: key '" + key + "' must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: key '" + key + "' must be a boolean");
}

}  // namespace

KeyValueMap parse_key_values(std::istream& is) {
  KeyValueMap kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " has no '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " has an empty key");
    if (!kv.emplace(key, value).second)
      throw std::invalid_argument("config: duplicate key '" + key + "'");
  }
  return kv;
}

KeyValueMap parse_key_values_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  return parse_key_values(is);
}

void ExperimentConfig::validate() const {
  if (experiment.empty())
    throw std::invalid_argument("config: 'experiment' is required");
  if (!(mass > 0.0)) throw std::invalid_argument("config: 'mass' must be > 0");
  if (!(model.p > 1.0)) throw std::invalid_argument("config: 'p' must be > 1");
  if (!(model.lambda >= 0.0))
    throw std::invalid_argument("config: 'lambda' must be >= 0");
  if (grid_n < 8 || (grid_n & (grid_n - 1)) != 0)
    throw std::invalid_argument("config: 'grid.n' must be a power of two >= 8");
  if (!(r_star_max > r_star_min))
    throw std::invalid_argument("config: 'grid.r_star_max' must exceed 'grid.r_star_min'");
  if (!(dt >= 0.0)) throw std::invalid_argument("config: 'dt' must be >= 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("config: 't_end' must be > 0");
  weight.validate();
  if (initial_data.type != "gaussian" && initial_data.type != "file")
    throw std::invalid_argument("config: 'initial_data.type' must be 'gaussian' or 'file'");
  if (initial_data.type == "gaussian" && !(initial_data.width > 0.0))
    throw std::invalid_argument("config: 'initial_data.width' must be > 0");
  if (initial_data.type == "file" && initial_data.path.empty())
    throw std::invalid_argument("config: 'initial_data.path' is required for type 'file'");
}

ExperimentConfig make_experiment_config(const KeyValueMap& kv) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  const auto take = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    seen.insert(key);
    return &it->second;
  };

  if (const auto* v = take("experiment")) cfg.experiment = *v;
  if (const auto* v = take("mass")) cfg.mass = to_double("mass", *v);
  if (const auto* v = take("lambda")) cfg.model.lambda = to_double("lambda", *v);
  if (const auto* v = take("p")) cfg.model.p = to_double("p", *v);
  if (const auto* v = take("grid.n")) cfg.grid_n = to_size("grid.n", *v);
  if (const auto* v = take("grid.r_star_min"))
    cfg.r_star_min = to_double("grid.r_star_min", *v);
  if (const auto* v = take("grid.r_star_max"))
    cfg.r_star_max = to_double("grid.r_star_max", *v);
  if (const auto* v = take("dt")) cfg.dt = to_double("dt", *v);
  if (const auto* v = take("t_end")) cfg.t_end = to_double("t_end", *v);
  if (const auto* v = take("record_every"))
    cfg.record_every = to_size("record_every", *v);
  if (const auto* v = take("sigma")) cfg.weight.sigma = to_double("sigma", *v);
  if (const auto* v = take("R")) cfg.weight.R = to_double("R", *v);
  if (const auto* v = take("initial_data.type")) cfg.initial_data.type = *v;
  if (const auto* v = take("initial_data.center"))
    cfg.initial_data.center = to_double("initial_data.center", *v);
  if (const auto* v = take("initial_data.width"))
    cfg.initial_data.width = to_double("initial_data.width", *v);
  if (const auto* v = take("initial_data.momentum"))
    cfg.initial_data.momentum = to_double("initial_data.momentum", *v);
  if (const auto* v = take("initial_data.amplitude"))
    cfg.initial_data.amplitude = to_double("initial_data.amplitude", *v);
  if (const auto* v = take("initial_data.path")) cfg.initial_data.path = *v;
  if (const auto* v = take("output_dir")) cfg.output_dir = *v;
  if (const auto* v = take("seed"))
    cfg.seed = static_cast<unsigned>(to_size("seed", *v));
  if (const auto* v = take("override_domain_guard"))
    cfg.override_domain_guard = to_bool("override_domain_guard", *v);

  for (const auto& [key, value] : kv) {
    (void)value;
    if (!seen.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return make_experiment_config(parse_key_values_file(path));
}

std::vector<std::string> render_config(const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  const auto add = [&](const std::string& key, const auto& value) {
    std::ostringstream os;
    os.precision(17);
    os << key << " = " << value;
    lines.push_back(os.str());
  };
  add("experiment", cfg.experiment);
  add("mass", cfg.mass);
  add("lambda", cfg.model.lambda);
  add("p", cfg.model.p);
  add("grid.n", cfg.grid_n);
  add("grid.r_star_min", cfg.r_star_min);
  add("grid.r_star_max", cfg.r_star_max);
  add("dt", cfg.dt);
  add("t_end", cfg.t_end);
  add("record_every", cfg.record_every);
  add("sigma", cfg.weight.sigma);
  add("R", cfg.weight.R);
  add("initial_data.type", cfg.initial_data.type);
  if (cfg.initial_data.type == "gaussian") {
    add("initial_data.center", cfg.initial_data.center);
    add("initial_data.width", cfg.initial_data.width);
    add("initial_data.momentum", cfg.initial_data.momentum);
    add("initial_data.amplitude", cfg.initial_data.amplitude);
  } else {
    add("initial_data.path", cfg.initial_data.path);
  }
  add("output_dir", cfg.output_dir);
  add("seed", cfg.seed);
  add("override_domain_guard", cfg.override_domain_guard ? "true" : "false");
  return lines;
}

unsigned resolve_thread_count() {
  if (const char* env = std::getenv("TORTOISE_NLS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace tnls
