#pragma once

#include <charconv>
#include <cstdint>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>

namespace opfkit {

/// Shortest round-trip decimal form of v, with bare exponents ("1e-8", not
/// "1e-08"). Used for prompts and reports so output is reproducible.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  auto e = s.find('e');
  if (e != std::string::npos) {
    std::string mant = s.substr(0, e);
    std::string exp = s.substr(e + 1);
    bool neg = !exp.empty() && exp[0] == '-';
    if (!exp.empty() && (exp[0] == '-' || exp[0] == '+')) exp.erase(0, 1);
    while (exp.size() > 1 && exp[0] == '0') exp.erase(0, 1);
    s = mant + "e" + (neg ? "-" : "") + exp;
  }
  return s;
}

/// Fixed-precision form used when a ResolutionSpec pins output digits.
inline std::string format_number(double v, int precision) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

/// FNV-1a, used wherever a stable cross-run hash is needed (config hashes,
/// paraphrase rotation). std::hash is not guaranteed stable.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

LogLevel& log_threshold();

/// Minimal stderr logger; data outputs never go through here.
inline void log(LogLevel level, const std::string& msg) {
  if (level < log_threshold()) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const char* tag = level == LogLevel::Debug  ? "debug"
                    : level == LogLevel::Info ? "info"
                    : level == LogLevel::Warn ? "warn"
                                              : "error";
  std::cerr << "[opfkit:" << tag << "] " << msg << "\n";
}

inline void log_warn(const std::string& msg) { log(LogLevel::Warn, msg); }
inline void log_info(const std::string& msg) { log(LogLevel::Info, msg); }
inline void log_debug(const std::string& msg) { log(LogLevel::Debug, msg); }

}  // namespace opfkit
