#include "orthocurv/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace orthocurv {

namespace {
std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}
}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t cpos = line.find_first_of("#;");
    if (cpos != std::string::npos) line = line.substr(0, cpos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    c.kv_[key] = val;
  }
  return c;
}

std::string Config::get_str(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing required config key: " + key);
  return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_num(const std::string& key) const {
  const std::string s = get_str(key);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw ConfigError("config key " + key + ": not a number: '" + s + "'");
  return v;
}

double Config::get_num(const std::string& key, double fallback) const {
  return has(key) ? get_num(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const double v = get_num(key);
  const long long n = static_cast<long long>(v);
  if (static_cast<double>(n) != v)
    throw ConfigError("config key " + key + ": expected an integer");
  return n;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_str(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key " + key + ": expected a boolean, got '" + s + "'");
}

std::vector<double> Config::get_num_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : get_str_list(key)) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      throw ConfigError("config key " + key + ": not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> Config::get_str_list(const std::string& key) const {
  const std::string s = get_str(key);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    std::string tok = trim(s.substr(start, comma - start));
    if (!tok.empty()) out.push_back(tok);
    start = comma + 1;
  }
  return out;
}

void Config::merge(const Config& overrides) {
  for (const auto& [k, v] : overrides.kv_) kv_[k] = v;
}

}  // namespace orthocurv
