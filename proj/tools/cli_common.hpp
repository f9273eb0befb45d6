#pragma once

#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <set>
#include <string>
#include <vector>

namespace mixdyn::cli {

inline constexpr const char* kVersion = "1.0.0";

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  bool seed_set = false;
  std::uint64_t seed = 0;
};

/// Reads and parses a JSON config; parse failures become ConfigError with the
/// parser's byte-offset diagnostic, unreadable files become IoError.
nlohmann::json load_config(const std::string& path);

/// Accessor that tracks which keys were consumed so unknown keys can be
/// rejected, and records the effective (default-filled) values for the
/// manifest echo.
class StrictConfig {
 public:
  explicit StrictConfig(nlohmann::json object);

  bool has(const std::string& key) const;
  double number(const std::string& key, double fallback);
  double number_required(const std::string& key);
  long integer(const std::string& key, long fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::string text_required(const std::string& key);
  std::vector<double> number_list(const std::string& key,
                                  std::vector<double> fallback);
  std::vector<long> integer_list(const std::string& key,
                                 std::vector<long> fallback);
  std::vector<std::string> text_list(const std::string& key,
                                     std::vector<std::string> fallback);

  /// Throws ConfigError naming any key that was never consumed.
  void reject_unknown() const;
  /// Effective config: every consumed key with the value actually used.
  const nlohmann::json& echo() const { return echo_; }
  void override_echo(const std::string& key, const nlohmann::json& value);

 private:
  const nlohmann::json& fetch(const std::string& key, const char* type) const;
  nlohmann::json object_;
  mutable std::set<std::string> used_;
  nlohmann::json echo_ = nlohmann::json::object();
};

/// CSV writer: RFC-4180 quoting, LF line endings, shortest round-trip doubles.
class Csv {
 public:
  Csv(const std::string& dir, const std::string& filename);

  static std::string cell(double v);
  static std::string cell(long v);
  static std::string cell(int v) { return cell(static_cast<long>(v)); }
  static std::string cell(const std::string& v);

  void row(const std::vector<std::string>& cells);
  const std::string& filename() const { return filename_; }

 private:
  std::ofstream out_;
  std::string filename_;
};

void write_manifest(const CliOptions& options, const std::string& subcommand,
                    const nlohmann::json& resolved_config, std::uint64_t seed,
                    const std::vector<std::string>& outputs);

/// Applies the MIXDYN_THREADS cap if the variable is set.
void setup_threads();

/// Creates the output directory if needed; throws IoError on failure.
void ensure_out_dir(const std::string& dir);

int cmd_teacher_student(const CliOptions& options);
int cmd_flow(const CliOptions& options);
int cmd_noise(const CliOptions& options);
int cmd_spectrum(const CliOptions& options);
int cmd_lossbound(const CliOptions& options);
int cmd_render(const CliOptions& options);

}  // namespace mixdyn::cli
