#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "helmfov/assembly.hpp"
#include "helmfov/precond.hpp"

namespace helmfov::harness {

/// Malformed config file or flag value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Settings shared by the CLI and the experiment runners. Lists that an
/// experiment sweeps over are empty until filled by defaults, the config
/// file or flags.
struct ExperimentConfig {
  int dim = 2;
  int level = 4;
  std::optional<int> coarse_level;
  std::vector<int> levels;
  std::vector<int> coarse_levels;
  std::vector<double> kappa2;
  std::vector<double> sigma;
  std::optional<LossProfile> sigma_box;
  PrecondSpec precond;
  std::vector<int> cycles;
  double tol = 1e-6;
  int max_iter = 200;
  int angles = 64;
  double eig_tol = 1e-10;
  double load = 1.0;
  std::uint64_t seed = 1;
  int threads = 1;
  /// Also compute the minimum real part of the field of values in the
  /// two-level sweep.
  bool min_re = true;
  std::filesystem::path out = "out";

  /// Loss profiles swept: the box if given, else one constant per sigma.
  std::vector<LossProfile> losses() const;
  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Overwrites fields present in a TOML file; unknown keys are errors.
void apply_toml(ExperimentConfig& cfg, const std::filesystem::path& path);
void apply_toml_string(ExperimentConfig& cfg, std::string_view text);

/// "x0,y0[,z0]:x1,y1[,z1]:value".
LossProfile parse_sigma_box(std::string_view text, int dim);
std::vector<double> parse_double_list(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);

}  // namespace helmfov::harness
