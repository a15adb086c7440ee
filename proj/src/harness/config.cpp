#include "helmfov/harness/config.hpp"

#include <charconv>
#include <cmath>

#include <toml.hpp>

namespace helmfov::harness {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

Point parse_point(std::string_view s, int dim) {
  const auto parts = split(s, ',');
  if (static_cast<int>(parts.size()) != dim) {
    throw ConfigError("sigma-box corner '" + std::string(s) + "' needs " + std::to_string(dim) +
                      " coordinates");
  }
  Point p{0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)] = parse_double(parts[static_cast<std::size_t>(i)]);
  return p;
}

template <typename T>
std::vector<T> node_list(const toml::node& node, const std::string& key) {
  std::vector<T> out;
  const auto push = [&](const toml::node& n) {
    if constexpr (std::is_same_v<T, int>) {
      const auto v = n.value<std::int64_t>();
      if (!v) throw ConfigError("config key '" + key + "' expects integers");
      out.push_back(static_cast<int>(*v));
    } else {
      const auto v = n.value<double>();
      if (!v) throw ConfigError("config key '" + key + "' expects numbers");
      out.push_back(*v);
    }
  };
  if (const auto* arr = node.as_array()) {
    for (const auto& n : *arr) push(n);
  } else {
    push(node);
  }
  return out;
}

template <typename T>
T scalar(const toml::node& node, const std::string& key) {
  const auto v = node.value<T>();
  if (!v) throw ConfigError("config key '" + key + "' has the wrong type");
  return *v;
}

void apply_table(ExperimentConfig& cfg, const toml::table& tbl) {
  // The box needs the final dimension, so it is parsed last.
  std::optional<std::string> box;
  for (const auto& [k, node] : tbl) {
    const std::string key(k.str());
    if (key == "dim") cfg.dim = static_cast<int>(scalar<std::int64_t>(node, key));
    else if (key == "level") cfg.level = static_cast<int>(scalar<std::int64_t>(node, key));
    else if (key == "coarse_level") cfg.coarse_level = static_cast<int>(scalar<std::int64_t>(node, key));
    else if (key == "levels") cfg.levels = node_list<int>(node, key);
    else if (key == "coarse_levels") cfg.coarse_levels = node_list<int>(node, key);
    else if (key == "kappa2") cfg.kappa2 = node_list<double>(node, key);
    else if (key == "sigma") cfg.sigma = node_list<double>(node, key);
    else if (key == "sigma_box") box = scalar<std::string>(node, key);
    else if (key == "precond") {
      try {
        cfg.precond = PrecondSpec::parse(scalar<std::string>(node, key));
      } catch (const ConfigError&) {
        throw;
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    else if (key == "cycles") cfg.cycles = node_list<int>(node, key);
    else if (key == "tol") cfg.tol = scalar<double>(node, key);
    else if (key == "max_iter") cfg.max_iter = static_cast<int>(scalar<std::int64_t>(node, key));
    else if (key == "angles") cfg.angles = static_cast<int>(scalar<std::int64_t>(node, key));
    else if (key == "eig_tol") cfg.eig_tol = scalar<double>(node, key);
    else if (key == "load") cfg.load = scalar<double>(node, key);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(scalar<std::int64_t>(node, key));
    else if (key == "threads") cfg.threads = static_cast<int>(scalar<std::int64_t>(node, key));
    else if (key == "min_re") cfg.min_re = scalar<bool>(node, key);
    else if (key == "out") cfg.out = scalar<std::string>(node, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  if (box) cfg.sigma_box = parse_sigma_box(*box, cfg.dim);
}

}  // namespace

std::vector<LossProfile> ExperimentConfig::losses() const {
  if (sigma_box) return {*sigma_box};
  std::vector<LossProfile> out;
  for (double s : sigma) out.push_back(LossProfile::constant(s));
  return out;
}

void ExperimentConfig::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
  if (level < 1) throw ConfigError("level must be >= 1");
  const auto check_level = [](int l, const char* what) {
    if (l < 1) throw ConfigError(std::string(what) + " must be >= 1");
  };
  for (int l : levels) check_level(l, "levels");
  for (int l : coarse_levels) check_level(l, "coarse_levels");
  if (coarse_level) check_level(*coarse_level, "coarse_level");
  for (double k : kappa2) {
    if (!std::isfinite(k) || k < 0.0) throw ConfigError("kappa2 must be finite and >= 0");
  }
  for (double s : sigma) {
    if (!std::isfinite(s) || s < 0.0) throw ConfigError("sigma must be finite and >= 0");
  }
  for (int c : cycles) {
    if (c < 1) throw ConfigError("cycles must be >= 1");
  }
  if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("tol must lie in (0, 1)");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (angles < 8) throw ConfigError("angles must be >= 8");
  if (!(eig_tol > 0.0)) throw ConfigError("eig_tol must be positive");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (sigma_box) {
    try {
      sigma_box->validate(dim);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
}

void apply_toml(ExperimentConfig& cfg, const std::filesystem::path& path) {
  try {
    apply_table(cfg, toml::parse_file(path.string()));
  } catch (const toml::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + std::string(e.description()));
  }
}

void apply_toml_string(ExperimentConfig& cfg, std::string_view text) {
  try {
    apply_table(cfg, toml::parse(text));
  } catch (const toml::parse_error& e) {
    throw ConfigError("config: " + std::string(e.description()));
  }
}

LossProfile parse_sigma_box(std::string_view text, int dim) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("sigma-box must look like x0,y0:x1,y1:value");
  const LossProfile loss =
      LossProfile::box(parse_point(parts[0], dim), parse_point(parts[1], dim), parse_double(parts[2]));
  try {
    loss.validate(dim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return loss;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_double(part));
  return out;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (auto part : split(text, ',')) out.push_back(parse_int(part));
  return out;
}

}  // namespace helmfov::harness
