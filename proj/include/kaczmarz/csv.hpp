#pragma once

// Deterministic CSV output. Reals are written with 17 significant digits so a
// file round-trips to the same doubles and reruns are byte-identical.

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace kaczmarz {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os) {
    row_strings(header);
  }

  template <class... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(fields), first = false), ...);
    os_ << '\n';
  }

  void row_strings(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << fields[i];
    os_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_real(v); }
  static std::string cell(float v) { return format_real(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(std::string_view s) { return std::string(s); }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }

  std::ostream& os_;
};

}  // namespace kaczmarz
