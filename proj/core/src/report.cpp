#include "orthocurv/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace orthocurv {

Json Json::num(double v) {
  Json j;
  j.kind_ = Kind::Num;
  j.n_ = v;
  return j;
}
Json Json::integer(long long v) {
  Json j;
  j.kind_ = Kind::Int;
  j.i_ = v;
  return j;
}
Json Json::boolean(bool v) {
  Json j;
  j.kind_ = Kind::Bool;
  j.b_ = v;
  return j;
}
Json Json::str(std::string v) {
  Json j;
  j.kind_ = Kind::Str;
  j.s_ = std::move(v);
  return j;
}
Json Json::array() {
  Json j;
  j.kind_ = Kind::Arr;
  return j;
}
Json Json::object() {
  Json j;
  j.kind_ = Kind::Obj;
  return j;
}
Json Json::num_array(const std::vector<double>& v) {
  Json j = array();
  for (double x : v) j.push(num(x));
  return j;
}
Json Json::str_array(const std::vector<std::string>& v) {
  Json j = array();
  for (const std::string& s : v) j.push(str(s));
  return j;
}

Json& Json::set(const std::string& key, Json v) {
  if (kind_ != Kind::Obj) throw ConfigError("report: set() on non-object JSON value");
  for (auto& kv : obj_)
    if (kv.first == key) {
      kv.second = std::move(v);
      return *this;
    }
  obj_.emplace_back(key, std::move(v));
  return *this;
}

Json& Json::push(Json v) {
  if (kind_ != Kind::Arr) throw ConfigError("report: push() on non-array JSON value");
  arr_.push_back(std::move(v));
  return *this;
}

const Json* Json::find(const std::string& key) const {
  if (kind_ != Kind::Obj) return nullptr;
  for (const auto& kv : obj_)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(2 * depth), ' '); }

}  // namespace

void Json::write(std::string& out, int depth) const {
  switch (kind_) {
    case Kind::Null:
      out += "null";
      break;
    case Kind::Bool:
      out += b_ ? "true" : "false";
      break;
    case Kind::Int:
      out += std::to_string(i_);
      break;
    case Kind::Num:
      // JSON has no non-finite literals; serialize them as strings so the
      // document stays parseable while staying lossless for finite values.
      if (std::isfinite(n_))
        out += float17(n_);
      else
        write_escaped(out, std::isnan(n_) ? "nan" : (n_ > 0 ? "inf" : "-inf"));
      break;
    case Kind::Str:
      write_escaped(out, s_);
      break;
    case Kind::Arr: {
      if (arr_.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < arr_.size(); ++i) {
        indent(out, depth + 1);
        arr_[i].write(out, depth + 1);
        out += (i + 1 < arr_.size()) ? ",\n" : "\n";
      }
      indent(out, depth);
      out += ']';
      break;
    }
    case Kind::Obj: {
      if (obj_.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (std::size_t i = 0; i < obj_.size(); ++i) {
        indent(out, depth + 1);
        write_escaped(out, obj_[i].first);
        out += ": ";
        obj_[i].second.write(out, depth + 1);
        out += (i + 1 < obj_.size()) ? ",\n" : "\n";
      }
      indent(out, depth);
      out += '}';
      break;
    }
  }
}

std::string Json::dump() const {
  std::string out;
  write(out, 0);
  out += '\n';
  return out;
}

Json config_echo(const Config& cfg) {
  Json j = Json::object();
  // threads is an execution-resource knob with no effect on results; keeping
  // it out of the echo keeps report payloads byte-identical across workers.
  for (const auto& kv : cfg.items())
    if (kv.first != "threads") j.set(kv.first, Json::str(kv.second));
  return j;
}

std::string finalize_report(Json doc) {
  if (!doc.is_object()) throw ConfigError("report: top-level document must be an object");
  doc.set("content_hash", Json::str(""));
  // Hash the serialization with the hash slot pinned empty, then fill it in;
  // re-running the finalizer on the result is idempotent.
  const std::string payload = doc.dump();
  doc.set("content_hash", Json::str(fnv1a64_hex(payload)));
  return doc.dump();
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += (i + 1 < header.size()) ? "," : "\n";
  }
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw ConfigError("report: ragged CSV row");
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += float17(row[i]);
      out += (i + 1 < row.size()) ? "," : "\n";
    }
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw ConfigError("report: cannot create directory " + p.parent_path().string());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("report: cannot open " + path + " for writing");
  out << content;
  if (!out) throw ConfigError("report: short write to " + path);
}

bool verdict_known(const std::string& v) {
  return v == "PASS" || v == "FAIL" || v == "NOT-APPLICABLE" || v == "SKIPPED";
}

int verdict_exit(const std::string& v) {
  if (!verdict_known(v)) throw ConfigError("report: unknown verdict " + v);
  return v == "FAIL" ? 1 : 0;
}

}  // namespace orthocurv
