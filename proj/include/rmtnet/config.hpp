#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "rmtnet/simulator.hpp"
#include "rmtnet/tagging.hpp"

namespace rmt {

/// Minimal INI-style config: [section], key = value, # or ; comments.
class Ini {
 public:
  static Ini parse(std::istream& in);
  static Ini parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> raw(const std::string& section, const std::string& key) const;

  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::int64_t get_i64(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct PipelineConfig {
  // [inputs]
  std::string trade_log;
  LogFormat trade_format = LogFormat::Csv;
  std::string play_log;    // optional
  LogFormat play_format = LogFormat::Csv;
  std::string market_log;  // optional
  LogFormat market_format = LogFormat::Csv;
  std::string account_map;  // optional csv: id,account

  // [windowing]
  std::int64_t epoch = 0;
  int weeks = 0;  // 0 = infer from the data

  // [detection]
  std::string algorithm = "multilevel";
  std::uint64_t seed = 42;
  double resolution = 1.0;
  bool weighted = true;
  std::string compare;  // comma-separated extra algorithms, "" = off

  // [clustering]
  int community_k = 5;
  int user_k = 7;
  std::uint64_t cluster_seed = 42;
  int restarts = 10;

  TaggingThresholds tagging;  // [tagging]

  // [estimation]
  bool permutation_test = false;
  int permutation_iterations = 10000;

  // [output]
  std::string out_dir = "out";
  bool graphml = true;
  bool dot = false;
  bool network_betweenness = true;
  bool strict = false;
  int jobs = 2;

  static PipelineConfig from_ini(const Ini& ini);
};

ScenarioConfig scenario_from_ini(const Ini& ini);

}  // namespace rmt
