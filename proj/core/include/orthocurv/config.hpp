#pragma once

#include <map>
#include <string>
#include <vector>

#include "orthocurv/util.hpp"

namespace orthocurv {

// INI-style configuration: "key = value" lines, optional [section] headers
// flattening to "section.key", '#'/';' comments. CLI flags are merged on top
// and win. The full merged map is echoed into every report.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_str(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key) const;
  double get_num(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_num_list(const std::string& key) const;
  std::vector<std::string> get_str_list(const std::string& key) const;

  void merge(const Config& overrides);
  const std::map<std::string, std::string>& items() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace orthocurv
