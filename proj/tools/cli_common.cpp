#include "cli_common.hpp"

#include <fmt/core.h>
#include <omp.h>

#include <cstdlib>
#include <filesystem>

#include "mixdyn/errors.hpp"

namespace mixdyn::cli {

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open config file '{}'", path));
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ConfigError(fmt::format("invalid JSON in '{}' at byte offset {}: {}",
                                  path, ex.byte, ex.what()));
  }
}

StrictConfig::StrictConfig(nlohmann::json object) : object_(std::move(object)) {
  if (!object_.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
}

bool StrictConfig::has(const std::string& key) const {
  return object_.contains(key);
}

const nlohmann::json& StrictConfig::fetch(const std::string& key,
                                          const char* type) const {
  const auto& value = object_.at(key);
  const bool ok = (std::string(type) == "number" && value.is_number()) ||
                  (std::string(type) == "integer" && value.is_number_integer()) ||
                  (std::string(type) == "boolean" && value.is_boolean()) ||
                  (std::string(type) == "string" && value.is_string()) ||
                  (std::string(type) == "array" && value.is_array());
  if (!ok) {
    throw ConfigError(fmt::format("config key '{}' must be a {}", key, type));
  }
  used_.insert(key);
  return value;
}

double StrictConfig::number(const std::string& key, double fallback) {
  const double v = has(key) ? fetch(key, "number").get<double>() : fallback;
  echo_[key] = v;
  return v;
}

double StrictConfig::number_required(const std::string& key) {
  if (!has(key)) throw ConfigError(fmt::format("missing config key '{}'", key));
  return number(key, 0.0);
}

long StrictConfig::integer(const std::string& key, long fallback) {
  const long v = has(key) ? fetch(key, "integer").get<long>() : fallback;
  echo_[key] = v;
  return v;
}

bool StrictConfig::boolean(const std::string& key, bool fallback) {
  const bool v = has(key) ? fetch(key, "boolean").get<bool>() : fallback;
  echo_[key] = v;
  return v;
}

std::string StrictConfig::text(const std::string& key,
                               const std::string& fallback) {
  const std::string v =
      has(key) ? fetch(key, "string").get<std::string>() : fallback;
  echo_[key] = v;
  return v;
}

std::string StrictConfig::text_required(const std::string& key) {
  if (!has(key)) throw ConfigError(fmt::format("missing config key '{}'", key));
  return text(key, "");
}

std::vector<double> StrictConfig::number_list(const std::string& key,
                                              std::vector<double> fallback) {
  std::vector<double> v = std::move(fallback);
  if (has(key)) {
    v.clear();
    for (const auto& item : fetch(key, "array")) {
      if (!item.is_number()) {
        throw ConfigError(fmt::format("config key '{}' must hold numbers", key));
      }
      v.push_back(item.get<double>());
    }
  }
  echo_[key] = v;
  return v;
}

std::vector<long> StrictConfig::integer_list(const std::string& key,
                                             std::vector<long> fallback) {
  std::vector<long> v = std::move(fallback);
  if (has(key)) {
    v.clear();
    for (const auto& item : fetch(key, "array")) {
      if (!item.is_number_integer()) {
        throw ConfigError(fmt::format("config key '{}' must hold integers", key));
      }
      v.push_back(item.get<long>());
    }
  }
  echo_[key] = v;
  return v;
}

std::vector<std::string> StrictConfig::text_list(
    const std::string& key, std::vector<std::string> fallback) {
  std::vector<std::string> v = std::move(fallback);
  if (has(key)) {
    v.clear();
    for (const auto& item : fetch(key, "array")) {
      if (!item.is_string()) {
        throw ConfigError(fmt::format("config key '{}' must hold strings", key));
      }
      v.push_back(item.get<std::string>());
    }
  }
  echo_[key] = v;
  return v;
}

void StrictConfig::reject_unknown() const {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : object_.items()) {
    if (!used_.count(key)) unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string joined;
    for (const auto& key : unknown) {
      if (!joined.empty()) joined += ", ";
      joined += "'" + key + "'";
    }
    throw ConfigError(fmt::format("unknown config key(s): {}", joined));
  }
}

void StrictConfig::override_echo(const std::string& key,
                                 const nlohmann::json& value) {
  echo_[key] = value;
}

Csv::Csv(const std::string& dir, const std::string& filename)
    : filename_(filename) {
  const std::string path = dir + "/" + filename;
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) {
    throw IoError(fmt::format("cannot open output file '{}'", path));
  }
}

std::string Csv::cell(double v) { return fmt::format("{}", v); }

std::string Csv::cell(long v) { return fmt::format("{}", v); }

std::string Csv::cell(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string quoted = "\"";
  for (char c : v) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void Csv::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw IoError(fmt::format("write failed on '{}'", filename_));
}

void write_manifest(const CliOptions& options, const std::string& subcommand,
                    const nlohmann::json& resolved_config, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  nlohmann::json manifest;
  manifest["tool"] = "mixdyn";
  manifest["version"] = kVersion;
  manifest["subcommand"] = subcommand;
  manifest["config_path"] = options.config_path;
  manifest["config"] = resolved_config;
  manifest["seed"] = seed;
  manifest["outputs"] = outputs;
  const std::string path = options.out_dir + "/manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}'", path));
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError(fmt::format("write failed on '{}'", path));
}

void setup_threads() {
  const char* env = std::getenv("MIXDYN_THREADS");
  if (env == nullptr) return;
  const int threads = std::atoi(env);
  if (threads > 0) omp_set_num_threads(threads);
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create output directory '{}': {}", dir,
                              ec.message()));
  }
}

}  // namespace mixdyn::cli
