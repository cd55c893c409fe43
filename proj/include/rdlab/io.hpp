#pragma once

#include <map>
#include <string>
#include <vector>

#include "rdlab/common.hpp"

#include <json.hpp>

namespace rdlab {

/// Flat configuration with dotted keys and JSON-compatible values:
///   solver.dt = 1e-3
///   nonlin.family = "cubic_bistable"
///   probes.c_list = [0.1, 0.2]
/// '#' starts a comment. Unquoted bare words parse as strings.
class Config {
public:
  Config() = default;

  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;

  template <typename T>
  T get(const std::string& key, const T& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return it->second.get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }

  template <typename T>
  T require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    try {
      return it->second.get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }

  const nlohmann::json* find(const std::string& key) const;
  void set(const std::string& key, nlohmann::json value);

  /// Canonical text form (sorted keys) used for hashing.
  std::string canonical() const;
  std::string hash() const;

private:
  std::map<std::string, nlohmann::json> values_;
};

/// Writes rows of doubles with a fixed %.17g format so identical inputs
/// produce byte-identical files.
class CsvWriter {
public:
  CsvWriter(std::string path, std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  void close();
  ~CsvWriter();

private:
  std::string path_;
  std::string buffer_;
  std::size_t ncols_;
  bool closed_ = false;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const; // -1 when absent
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

/// Every command records what it produced.
struct Manifest {
  std::string command;
  std::string config_hash;
  std::vector<std::string> artifacts;
  nlohmann::json extra;

  void write(const std::string& path) const;
};

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);
void ensure_directory(const std::string& path);

} // namespace rdlab
