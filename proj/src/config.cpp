#include "hnc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace hnc {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  require(ec == std::errc{} && ptr == text.data() + text.size(),
          fmt::format("config: '{}' is not a valid value for {}", text, key));
  return value;
}

// strtod is locale-sensitive but the "C" locale is never changed here, and
// libstdc++ 11 lacks floating-point from_chars.
double parse_double(std::string_view key, std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(!s.empty() && end == s.c_str() + s.size() && std::isfinite(v),
          fmt::format("config: '{}' is not a valid value for {}", text, key));
  return v;
}

std::string join_doubles(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double d : v) parts.push_back(fmt::format("{}", d));
  return fmt::format("{}", fmt::join(parts, ","));
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "task.kind") task_kind = parse_task_kind(value);
  else if (key == "task.d") task_d = parse_number<int>(key, value);
  else if (key == "task.prototypes") task_prototypes = parse_number<int>(key, value);
  else if (key == "task.noise_sigma") noise_sigma = parse_double(key, value);
  else if (key == "pool.size") pool_size = parse_number<int>(key, value);
  else if (key == "queries.size") query_count = parse_number<int>(key, value);
  else if (key == "oracle.kind") {
    require(value == "builtin" || value == "remote", fmt::format("config: unknown oracle.kind '{}'", value));
    oracle_kind = std::string(value);
  } else if (key == "oracle.endpoint") oracle_endpoint = std::string(value);
  else if (key == "oracle.gamma") oracle_gamma = parse_double(key, value);
  else if (key == "oracle.timeout_ms") oracle_timeout_ms = parse_number<int>(key, value);
  else if (key == "oracle.retries") oracle_retries = parse_number<int>(key, value);
  else if (key == "score") score = parse_score_kind(value);
  else if (key == "strategies") {
    strategies.clear();
    for (auto s : split_list(value)) strategies.push_back(parse_strategy(s));
  } else if (key == "k_values") {
    k_values.clear();
    for (auto s : split_list(value)) k_values.push_back(parse_number<int>(key, s));
  } else if (key == "trials") trials = parse_number<int>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "subsample") {
    subsample = value == "all" ? Subsample{} : Subsample{parse_number<int>(key, value)};
  } else if (key == "output") output = std::string(value);
  else if (key == "sweep.gamma") {
    sweep_gamma.clear();
    for (auto s : split_list(value)) sweep_gamma.push_back(parse_double(key, s));
  } else if (key == "sweep.m") {
    sweep_m.clear();
    for (auto s : split_list(value)) sweep_m.push_back(parse_number<int>(key, s));
  } else if (key == "sweep.dup_fraction") {
    sweep_dup_fraction.clear();
    for (auto s : split_list(value)) sweep_dup_fraction.push_back(parse_double(key, s));
  } else if (key == "sweep.instances") sweep_instances = parse_number<int>(key, value);
  else if (key == "sweep.dim") sweep_dim = parse_number<int>(key, value);
  else if (key == "sweep.dz_scale") sweep_dz_scale = parse_double(key, value);
  else throw InvalidArgument(fmt::format("config: unknown key '{}'", key));
}

void ExperimentConfig::validate() const {
  require(task_d >= 1 && task_prototypes >= 1, "config: task.d and task.prototypes must be positive");
  require(noise_sigma >= 0.0, "config: task.noise_sigma must be non-negative");
  require(pool_size >= 2, "config: pool.size must be >= 2");
  require(query_count >= 1, "config: queries.size must be >= 1");
  require(oracle_gamma > 0.0, "config: oracle.gamma must be positive");
  require(oracle_kind != "remote" || !oracle_endpoint.empty(), "config: remote oracle needs oracle.endpoint");
  require(!strategies.empty(), "config: no strategies");
  require(!k_values.empty(), "config: no k_values");
  require(std::is_sorted(k_values.begin(), k_values.end()), "config: k_values must be ascending");
  require(k_values.front() >= 1 && k_values.back() <= pool_size, "config: k_values must lie in [1, pool.size]");
  require(trials >= 1, "config: trials must be >= 1");
  require(!subsample || (*subsample >= 1 && *subsample <= pool_size - 1),
          "config: subsample must be 'all' or in [1, pool.size - 1]");
  require(!sweep_gamma.empty() && !sweep_m.empty() && !sweep_dup_fraction.empty(), "config: empty sweep grid");
  for (double g : sweep_gamma) require(g > 0.0, "config: sweep.gamma entries must be positive");
  for (int m : sweep_m) require(m >= 1, "config: sweep.m entries must be >= 1");
  for (double f : sweep_dup_fraction) require(f >= 0.0 && f <= 1.0, "config: sweep.dup_fraction must lie in [0, 1]");
  require(sweep_instances >= 1 && sweep_dim >= 1, "config: sweep.instances and sweep.dim must be positive");
  require(sweep_dz_scale >= 0.0, "config: sweep.dz_scale must be non-negative");
}

std::string ExperimentConfig::describe() const {
  std::vector<std::string> strats;
  for (auto s : strategies) strats.emplace_back(to_string(s));
  std::string out;
  auto line = [&](std::string_view k, const std::string& v) { out += fmt::format("{} = {}\n", k, v); };
  line("task.kind", std::string(to_string(task_kind)));
  line("task.d", std::to_string(task_d));
  line("task.prototypes", std::to_string(task_prototypes));
  line("task.noise_sigma", fmt::format("{}", noise_sigma));
  line("pool.size", std::to_string(pool_size));
  line("queries.size", std::to_string(query_count));
  line("oracle.kind", oracle_kind);
  line("oracle.endpoint", oracle_endpoint);
  line("oracle.gamma", fmt::format("{}", oracle_gamma));
  line("oracle.timeout_ms", std::to_string(oracle_timeout_ms));
  line("oracle.retries", std::to_string(oracle_retries));
  line("score", std::string(to_string(score)));
  line("strategies", fmt::format("{}", fmt::join(strats, ",")));
  line("k_values", fmt::format("{}", fmt::join(k_values, ",")));
  line("trials", std::to_string(trials));
  line("seed", std::to_string(seed));
  line("subsample", subsample ? std::to_string(*subsample) : "all");
  line("output", output);
  line("sweep.gamma", join_doubles(sweep_gamma));
  line("sweep.m", fmt::format("{}", fmt::join(sweep_m, ",")));
  line("sweep.dup_fraction", join_doubles(sweep_dup_fraction));
  line("sweep.instances", std::to_string(sweep_instances));
  line("sweep.dim", std::to_string(sweep_dim));
  line("sweep.dz_scale", fmt::format("{}", sweep_dz_scale));
  return out;
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string_view::npos, fmt::format("config line {}: expected 'key = value'", line_no));
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  require(static_cast<bool>(in), fmt::format("cannot read config file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

}  // namespace hnc
