#pragma once

#include <string>
#include <utility>
#include <vector>

#include "orthocurv/config.hpp"

namespace orthocurv {

// Insertion-ordered JSON document with a fixed serialization: 2-space indent,
// floats as 17-significant-digit decimals (round-trip exact), object keys in
// insertion order. The report format contract (stable field order, explicit
// float width, content hash over the exact bytes) is taken literally, so
// emission is hand-rolled instead of delegated to a general JSON library.
class Json {
 public:
  Json() = default;

  static Json num(double v);
  static Json integer(long long v);
  static Json boolean(bool v);
  static Json str(std::string v);
  static Json array();
  static Json object();
  static Json num_array(const std::vector<double>& v);
  static Json str_array(const std::vector<std::string>& v);

  bool is_object() const { return kind_ == Kind::Obj; }
  bool is_array() const { return kind_ == Kind::Arr; }

  // Object insert; replaces in place (keeping position) if the key exists.
  Json& set(const std::string& key, Json v);
  // Array append.
  Json& push(Json v);
  // Object lookup; nullptr when absent (or not an object).
  const Json* find(const std::string& key) const;

  std::string dump() const;  // trailing newline included

 private:
  enum class Kind { Null, Bool, Int, Num, Str, Arr, Obj };
  Kind kind_ = Kind::Null;
  bool b_ = false;
  long long i_ = 0;
  double n_ = 0.0;
  std::string s_;
  std::vector<Json> arr_;
  std::vector<std::pair<std::string, Json>> obj_;
  void write(std::string& out, int depth) const;
};

// The merged effective config as a JSON object (map order: sorted keys).
Json config_echo(const Config& cfg);

// Computes the content hash of the document with any existing "content_hash"
// removed, inserts it as hex, and returns the final serialization. Reports
// carry no timestamps, so equal content implies equal bytes and equal hash.
std::string finalize_report(Json doc);

// CSV with float17 cells, header first, '\n' line endings.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

// Writes content, creating parent directories as needed.
void write_text_file(const std::string& path, const std::string& content);

// Verdict taxonomy: PASS/NOT-APPLICABLE/SKIPPED exit 0, FAIL exit 1.
bool verdict_known(const std::string& verdict);
int verdict_exit(const std::string& verdict);

}  // namespace orthocurv
