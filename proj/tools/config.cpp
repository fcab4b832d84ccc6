#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace deepesn::cli {

const char* to_string(Model m) noexcept {
  switch (m) {
    case Model::deep: return "deep";
    case Model::shallow: return "shallow";
    case Model::both: return "both";
  }
  return "?";
}

const char* to_string(Mode m) noexcept { return m == Mode::grid ? "grid" : "single"; }

int parse_task(const std::string& text) {
  std::string s = text;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s.rfind("mso", 0) == 0) s = s.substr(3);
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ConfigError("field 'task': expected mso1..mso12, got '" + text + "'");
  }
  const int n = std::stoi(s);
  if (n < 1 || n > 12) throw ConfigError("field 'task': MSO order must lie in [1, 12]");
  return n;
}

namespace {

bool on_list(double v, const std::vector<double>& list) {
  return std::any_of(list.begin(), list.end(),
                     [&](double c) { return std::abs(c - v) <= 1e-12 * std::max(1.0, std::abs(c)); });
}

void check_domain(const char* field, const std::vector<double>& values, const std::vector<double>& allowed) {
  for (double v : values) {
    if (!on_list(v, allowed)) {
      throw ConfigError(std::string("field '") + field + "': value " + std::to_string(v) +
                        " is outside the model-selection grid (use --allow-off-grid)");
    }
  }
}

template <typename T>
T get(const nlohmann::json& j, const std::string& key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("field '" + path + "': wrong type or missing");
  }
}

std::vector<double> get_list(const nlohmann::json& j, const std::string& key, const std::string& path) {
  const auto& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError("field '" + path + "': expected a number or an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("field '" + path + "': expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Model parse_model(const std::string& s) {
  if (s == "deep") return Model::deep;
  if (s == "shallow") return Model::shallow;
  if (s == "both") return Model::both;
  throw ConfigError("field 'model': expected deep, shallow or both, got '" + s + "'");
}

}  // namespace

void apply_json(ExperimentConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  static const std::vector<std::string> known = {"task", "length", "split", "model", "mode", "layers",
                                                 "units", "grid", "single", "analysis", "guesses", "seed",
                                                 "workers", "out", "allow_off_grid"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("field '" + key + "': unknown key");
    }
  }
  if (j.contains("task")) {
    const auto& t = j.at("task");
    cfg.task_n = t.is_number_integer() ? t.get<int>() : parse_task(get<std::string>(j, "task", "task"));
    if (cfg.task_n < 1 || cfg.task_n > 12) throw ConfigError("field 'task': MSO order must lie in [1, 12]");
  }
  if (j.contains("length")) cfg.length = get<Index>(j, "length", "length");
  if (j.contains("split")) {
    const auto& s = j.at("split");
    if (!s.is_object()) throw ConfigError("field 'split': expected an object");
    if (s.contains("train_end")) cfg.split.train_end = get<Index>(s, "train_end", "split.train_end");
    if (s.contains("washout")) cfg.split.washout = get<Index>(s, "washout", "split.washout");
    if (s.contains("validation_end")) {
      cfg.split.validation_end = get<Index>(s, "validation_end", "split.validation_end");
    }
    if (s.contains("test_end")) cfg.split.test_end = get<Index>(s, "test_end", "split.test_end");
    cfg.split.validation_begin = cfg.split.train_end + 1;
    cfg.split.test_begin = cfg.split.validation_end + 1;
  }
  if (j.contains("model")) cfg.model = parse_model(get<std::string>(j, "model", "model"));
  const bool has_grid = j.contains("grid");
  const bool has_single = j.contains("single");
  if (j.contains("mode")) {
    const auto m = get<std::string>(j, "mode", "mode");
    if (m == "grid") {
      cfg.mode = Mode::grid;
    } else if (m == "single") {
      cfg.mode = Mode::single;
    } else {
      throw ConfigError("field 'mode': expected grid or single, got '" + m + "'");
    }
  } else if (has_grid && has_single) {
    throw ConfigError("field 'mode': both 'grid' and 'single' given; set mode explicitly");
  } else if (has_single) {
    cfg.mode = Mode::single;
  } else if (has_grid) {
    cfg.mode = Mode::grid;
  }
  if (j.contains("layers")) cfg.layers = get<int>(j, "layers", "layers");
  if (j.contains("units")) cfg.units = get<int>(j, "units", "units");
  if (has_grid) {
    const auto& g = j.at("grid");
    if (!g.is_object()) throw ConfigError("field 'grid': expected an object");
    if (g.contains("input_scale")) cfg.grid.input_scales = get_list(g, "input_scale", "grid.input_scale");
    if (g.contains("leak_rate")) cfg.grid.leak_rates = get_list(g, "leak_rate", "grid.leak_rate");
    if (g.contains("spectral_radius")) {
      cfg.grid.spectral_radii = get_list(g, "spectral_radius", "grid.spectral_radius");
    }
    if (g.contains("lambda")) cfg.grid.lambdas = get_list(g, "lambda", "grid.lambda");
  }
  if (has_single) {
    const auto& s = j.at("single");
    if (!s.is_object()) throw ConfigError("field 'single': expected an object");
    if (s.contains("input_scale")) cfg.single.input_scale = get<double>(s, "input_scale", "single.input_scale");
    if (s.contains("leak_rate")) cfg.single.leak_rate = get<double>(s, "leak_rate", "single.leak_rate");
    if (s.contains("spectral_radius")) {
      cfg.single.spectral_radius = get<double>(s, "spectral_radius", "single.spectral_radius");
    }
    if (s.contains("lambda")) cfg.single.lambda = get<double>(s, "lambda", "single.lambda");
  }
  if (j.contains("analysis")) {
    const auto& a = j.at("analysis");
    if (!a.is_object()) throw ConfigError("field 'analysis': expected an object");
    if (a.contains("equivalence")) cfg.equivalence = get<bool>(a, "equivalence", "analysis.equivalence");
    if (a.contains("spectrum")) cfg.spectrum = get<bool>(a, "spectrum", "analysis.spectrum");
    if (a.contains("spectrum_washout")) {
      cfg.spectrum_washout = get<Index>(a, "spectrum_washout", "analysis.spectrum_washout");
    }
  }
  if (j.contains("guesses")) cfg.guesses = get<int>(j, "guesses", "guesses");
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed", "seed");
  if (j.contains("workers")) cfg.workers = get<int>(j, "workers", "workers");
  if (j.contains("out")) cfg.out = get<std::string>(j, "out", "out");
  if (j.contains("allow_off_grid")) cfg.allow_off_grid = get<bool>(j, "allow_off_grid", "allow_off_grid");
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  ExperimentConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

void ExperimentConfig::validate() const {
  if (task_n < 1 || task_n > 12) throw ConfigError("field 'task': MSO order must lie in [1, 12]");
  if (layers < 1) throw ConfigError("field 'layers': must be >= 1");
  if (units < 1) throw ConfigError("field 'units': must be >= 1");
  if (guesses < 1) throw ConfigError("field 'guesses': must be >= 1");
  if (workers < 0) throw ConfigError("field 'workers': must be >= 0");
  try {
    task();
  } catch (const Error& e) {
    throw ConfigError(std::string("field 'split': ") + e.what());
  }
  for (Model m : {Model::deep, Model::shallow}) {
    try {
      grid_for(m).validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("field 'grid': ") + e.what());
    }
  }
  const auto check_open = [](const char* field, const std::vector<double>& v, double lo, double hi) {
    for (double x : v) {
      if (!(x > lo && x <= hi)) {
        throw ConfigError(std::string("field '") + field + "': value " + std::to_string(x) + " out of range");
      }
    }
  };
  const GridSpec g = grid_for(Model::deep);
  check_open(mode == Mode::grid ? "grid.leak_rate" : "single.leak_rate", g.leak_rates, 0.0, 1.0);
  check_open(mode == Mode::grid ? "grid.spectral_radius" : "single.spectral_radius", g.spectral_radii, 0.0,
             1e300);
  for (double s : g.input_scales) {
    if (!(s >= 0.0)) throw ConfigError("field 'input_scale': must be >= 0");
  }
  if (!allow_off_grid) {
    const GridSpec t = GridSpec::table1();
    const bool grid_mode = mode == Mode::grid;
    check_domain(grid_mode ? "grid.input_scale" : "single.input_scale", g.input_scales, t.input_scales);
    check_domain(grid_mode ? "grid.leak_rate" : "single.leak_rate", g.leak_rates, t.leak_rates);
    check_domain(grid_mode ? "grid.spectral_radius" : "single.spectral_radius", g.spectral_radii,
                 t.spectral_radii);
    check_domain(grid_mode ? "grid.lambda" : "single.lambda", g.lambdas, t.lambdas);
  }
}

MsoTask ExperimentConfig::task() const {
  MsoTask t = MsoTask::canonical(task_n);
  t.length = length;
  t.split = split;
  t.validate();
  return t;
}

GridSpec ExperimentConfig::grid_for(Model m) const {
  GridSpec g = grid;
  if (mode == Mode::single) {
    g.input_scales = {single.input_scale};
    g.leak_rates = {single.leak_rate};
    g.spectral_radii = {single.spectral_radius};
    g.lambdas = {single.lambda};
  }
  g.num_layers = m == Model::shallow ? 1 : layers;
  g.units_per_layer = m == Model::shallow ? layers * units : units;
  g.guesses = guesses;
  g.base_seed = seed;
  return g;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["task"] = "mso" + std::to_string(task_n);
  j["length"] = length;
  j["split"] = {{"train_end", split.train_end},
                {"washout", split.washout},
                {"validation_end", split.validation_end},
                {"test_end", split.test_end}};
  j["model"] = to_string(model);
  j["mode"] = to_string(mode);
  j["layers"] = layers;
  j["units"] = units;
  if (mode == Mode::grid) {
    j["grid"] = {{"input_scale", grid.input_scales},
                 {"leak_rate", grid.leak_rates},
                 {"spectral_radius", grid.spectral_radii},
                 {"lambda", grid.lambdas}};
  } else {
    j["single"] = {{"input_scale", single.input_scale},
                   {"leak_rate", single.leak_rate},
                   {"spectral_radius", single.spectral_radius},
                   {"lambda", single.lambda}};
  }
  j["analysis"] = {{"equivalence", equivalence}, {"spectrum", spectrum}, {"spectrum_washout", spectrum_washout}};
  j["guesses"] = guesses;
  j["seed"] = seed;
  j["out"] = out.string();
  j["allow_off_grid"] = allow_off_grid;
  return j;
}

}  // namespace deepesn::cli
