#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"

namespace warpgh::report {

/**
 * @brief Flat `key = value` run configuration.
 *
 * Blank lines and lines starting with '#' are ignored. Keys may contain dots.
 * Every key read is recorded so unknown keys can be rejected before work starts.
 */
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig parse(const std::string& text, const std::string& source = "config") {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        fail(ErrorKind::Parse, "cli_reports", "parse_config", source + ":" + std::to_string(no) + ": expected key = value");
      const std::string k = trim(t.substr(0, eq)), v = trim(t.substr(eq + 1));
      if (k.empty()) fail(ErrorKind::Parse, "cli_reports", "parse_config", source + ":" + std::to_string(no) + ": empty key");
      if (c.values_.count(k))
        fail(ErrorKind::Parse, "cli_reports", "parse_config", source + ":" + std::to_string(no) + ": duplicate key '" + k + "'");
      c.values_[k] = v;
    }
    return c;
  }

  static RunConfig load(const std::string& path) { return parse(read_text_file(path, "cli_reports", "load_config"), path); }

  void set(const std::string& k, const std::string& v) { values_[k] = v; }
  bool has(const std::string& k) const { return values_.count(k) > 0; }
  /// Marks a key as accepted without reading it.
  void allow(const std::string& k) const { used_.insert(k); }

  std::string str(const std::string& k, const std::string& def) const {
    used_.insert(k);
    const auto it = values_.find(k);
    return it == values_.end() ? def : it->second;
  }

  double num(const std::string& k, double def) const {
    if (!has(k)) return str(k, ""), def;
    const std::string v = str(k, "");
    try {
      size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      fail(ErrorKind::Validation, "cli_reports", "config", "key '" + k + "' expects a number, got '" + v + "'");
    }
  }

  int64_t integer(const std::string& k, int64_t def) const {
    if (!has(k)) return str(k, ""), def;
    const std::string v = str(k, "");
    try {
      size_t pos = 0;
      const long long i = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return i;
    } catch (const std::exception&) {
      fail(ErrorKind::Validation, "cli_reports", "config", "key '" + k + "' expects an integer, got '" + v + "'");
    }
  }

  bool flag(const std::string& k, bool def) const {
    if (!has(k)) return str(k, ""), def;
    const std::string v = str(k, "");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorKind::Validation, "cli_reports", "config", "key '" + k + "' expects true/false, got '" + v + "'");
  }

  /// Comma-separated numbers.
  std::vector<double> numbers(const std::string& k, const std::vector<double>& def) const {
    if (!has(k)) return str(k, ""), def;
    std::vector<double> out;
    std::istringstream in(str(k, ""));
    std::string item;
    while (std::getline(in, item, ',')) {
      RunConfig one;
      one.set(k, trim(item));
      out.push_back(one.num(k, 0.0));
    }
    return out;
  }

  /// Comma-separated strings.
  std::vector<std::string> strings(const std::string& k) const {
    std::vector<std::string> out;
    std::istringstream in(str(k, ""));
    std::string item;
    while (std::getline(in, item, ','))
      if (!trim(item).empty()) out.push_back(trim(item));
    return out;
  }

  /// Fails on any key that no getter asked for.
  void reject_unknown() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) fail(ErrorKind::Validation, "cli_reports", "config", "unknown key '" + k + "'");
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace warpgh::report
