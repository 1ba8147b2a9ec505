#pragma once

// Problem container file.
//
//   line 1        JSON header: {"format":"kaczmarz-problem","version":1,"name",
//                 "params":{...},"m","n","row_origin":[...]}
//   lines 2..m+1  row i of A followed by b_bar[i]: a_i1,...,a_in,b_i
//   line m+2      x_bar: x_1,...,x_n
//
// Values are printed with 17 significant digits, so a write/read cycle
// reproduces the problem exactly.

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "kaczmarz/csv.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/problems.hpp"

namespace kaczmarz {

inline void write_problem(std::ostream& os, const TestProblem& p) {
  nlohmann::ordered_json h;
  h["format"] = "kaczmarz-problem";
  h["version"] = 1;
  h["name"] = p.name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : p.params) params[k] = v;
  h["params"] = params;
  h["m"] = p.m();
  h["n"] = p.n();
  h["row_origin"] = p.row_origin;
  os << h.dump() << '\n';
  for (std::size_t i = 0; i < p.m(); ++i) {
    for (std::size_t j = 0; j < p.n(); ++j) os << format_real(p.A(i, j)) << ',';
    os << format_real(p.b_bar[i]) << '\n';
  }
  for (std::size_t j = 0; j < p.n(); ++j) os << (j ? "," : "") << format_real(p.x_bar[j]);
  os << '\n';
}

namespace detail {

inline Vector parse_csv_line(const std::string& line, std::size_t expected, std::size_t lineno) {
  Vector out;
  out.reserve(expected);
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t end = std::min(line.find(',', pos), line.size());
    const std::string cell = line.substr(pos, end - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InvalidArgument("problem file line " + std::to_string(lineno) + ": bad number '" + cell + "'");
    }
    pos = end + 1;
  }
  if (out.size() != expected)
    throw InvalidArgument("problem file line " + std::to_string(lineno) + ": expected " +
                          std::to_string(expected) + " values, got " + std::to_string(out.size()));
  return out;
}

}  // namespace detail

inline TestProblem read_problem(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("problem file: missing header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("problem file: bad header: ") + e.what());
  }
  if (h.value("format", "") != "kaczmarz-problem") throw InvalidArgument("problem file: wrong format tag");
  TestProblem p;
  std::size_t m = 0, n = 0;
  try {
    p.name = h.at("name").get<std::string>();
    for (const auto& [k, v] : h.at("params").items()) p.params[k] = v.get<double>();
    m = h.at("m").get<std::size_t>();
    n = h.at("n").get<std::size_t>();
    if (h.contains("row_origin")) p.row_origin = h["row_origin"].get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("problem file: bad header: ") + e.what());
  }
  if (m == 0 || n == 0) throw InvalidArgument("problem file: empty matrix");
  p.A = DenseMatrix(m, n);
  p.b_bar.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::getline(is, line)) throw InvalidArgument("problem file: truncated matrix payload");
    const Vector v = detail::parse_csv_line(line, n + 1, i + 2);
    std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), p.A.row(i).begin());
    p.b_bar[i] = v[n];
  }
  if (!std::getline(is, line)) throw InvalidArgument("problem file: missing x_bar line");
  p.x_bar = detail::parse_csv_line(line, n, m + 2);
  require_finite(p.A, "problem file");
  return p;
}

inline void save_problem(const std::string& path, const TestProblem& p) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open '" + path + "' for writing");
  write_problem(os, p);
}

inline TestProblem load_problem(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open '" + path + "'");
  return read_problem(is);
}

}  // namespace kaczmarz
