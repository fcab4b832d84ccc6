#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "deepesn/mso.hpp"

namespace deepesn::cli {

/// Malformed or out-of-domain configuration; the message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { grid, single };
enum class Model { deep, shallow, both };

const char* to_string(Model m) noexcept;
const char* to_string(Mode m) noexcept;

struct SingleConfig {
  double input_scale = 1.0;
  double leak_rate = 0.9;
  double spectral_radius = 0.7;
  double lambda = 1e-8;
};

/// Everything `deepesn run` needs. Defaults reproduce the MSO model-selection
/// protocol: 10 x 100 linear reservoir, full grid, 10 guesses.
struct ExperimentConfig {
  int task_n = 5;
  Index length = 1000;
  SplitSpec split;
  Model model = Model::deep;
  Mode mode = Mode::grid;
  int layers = 10;
  int units = 100;
  GridSpec grid = GridSpec::table1();
  SingleConfig single;
  bool equivalence = false;
  bool spectrum = false;
  Index spectrum_washout = 100;
  int guesses = 10;
  std::uint64_t seed = 0;
  int workers = 0;
  std::filesystem::path out = "results";
  bool allow_off_grid = false;

  /// Throws ConfigError when a field is out of its domain.
  void validate() const;

  MsoTask task() const;

  /// Candidate lists for one model; single mode yields one-element lists.
  GridSpec grid_for(Model m) const;

  nlohmann::json to_json() const;
};

/// Parses "mso5" / "MSO5" / "5".
int parse_task(const std::string& text);

/// Overlays the keys present in `j` onto `cfg`.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& j);

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace deepesn::cli
