#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "warpgh/core/error.hpp"

namespace warpgh {

using json = nlohmann::ordered_json;

/// Formats a double with 17 significant digits (round-trips exactly).
inline std::string fmt17(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "NaN" : (v > 0 ? "Infinity" : "-Infinity");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace detail {

inline void dump17_rec(const json& j, std::string& out, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out.push_back('\n');
    out.append(static_cast<size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump17_rec(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      out.push_back('[');
      bool first = true;
      for (const auto& v : j) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        dump17_rec(v, out, indent, depth + 1);
      }
      newline(depth);
      out.push_back(']');
      return;
    }
    case json::value_t::number_float: out += fmt17(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// JSON text with every floating-point number written with 17 significant digits.
inline std::string dump17(const json& j, int indent = 2) {
  std::string out;
  detail::dump17_rec(j, out, indent, 0);
  if (indent >= 0) out.push_back('\n');
  return out;
}

/// FNV-1a 64-bit hash rendered as 16 hex digits; used for content ids.
inline std::string content_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_text_file(const std::string& path, const std::string& module, const std::string& op) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, module, op, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text, const std::string& module,
                            const std::string& op) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, module, op, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::Io, module, op, "write failed for " + path);
}

inline json parse_json(const std::string& text, const std::string& module, const std::string& op) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, module, op, e.what());
  }
}

}  // namespace warpgh
