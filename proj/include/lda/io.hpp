#pragma once

// Text formats: instances, edge-list topologies, result JSON and CSV tables.
//
// Instance format:
//   # comment lines anywhere
//   N
//   i j value     coupler J_ij (i < j)
//   i i value     bias h_i
// Values are written as the shortest decimal that round-trips.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "lda/errors.hpp"
#include "lda/instances.hpp"
#include "lda/protocols.hpp"
#include "lda/spin_model.hpp"

namespace lda {

inline constexpr int result_schema_version = 1;

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r')) ++k;
    const std::size_t start = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r') ++k;
    if (k > start) out.push_back(line.substr(start, k - start));
  }
  return out;
}

inline bool is_skippable(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

inline std::size_t parse_index(std::string_view text, std::size_t line) {
  std::size_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw parse_error(line, "expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

inline double parse_value(std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw parse_error(line, "expected a number, got '" + std::string(text) + "'");
  return v;
}

// Reads the leading site count; returns false at end of input.
inline bool read_header(std::istream& in, std::size_t& line_no, std::size_t& n) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto f = split_fields(line);
    if (f.size() != 1) throw parse_error(line_no, "expected the site count on its own line");
    n = parse_index(f[0], line_no);
    return true;
  }
  return false;
}

}  // namespace detail

inline spin_glass parse_instance(std::istream& in) {
  std::size_t line_no = 0;
  std::size_t n = 0;
  if (!detail::read_header(in, line_no, n)) throw parse_error(line_no, "missing site count");
  spin_glass::coupler_map couplers;
  spin_glass::bias_map biases;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 3) throw parse_error(line_no, "expected 'i j value'");
    const std::size_t i = detail::parse_index(f[0], line_no);
    const std::size_t j = detail::parse_index(f[1], line_no);
    const double v = detail::parse_value(f[2], line_no);
    if (i >= n || j >= n) throw parse_error(line_no, "site index out of range for " + std::to_string(n) + " sites");
    if (i > j) throw parse_error(line_no, "coupler indices must satisfy i < j");
    if (i == j) {
      if (!biases.emplace(i, v).second) throw parse_error(line_no, "duplicate bias on site " + std::to_string(i));
    } else if (!couplers.emplace(site_pair{i, j}, v).second) {
      throw parse_error(line_no, "duplicate coupler (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
  return spin_glass(n, std::move(couplers), std::move(biases));
}

inline void write_instance(std::ostream& out, const spin_glass& instance) {
  out << instance.n_sites() << '\n';
  for (const auto& [key, j] : instance.couplers())
    out << key.first << ' ' << key.second << ' ' << format_double(j) << '\n';
  for (const auto& [i, h] : instance.biases()) out << i << ' ' << i << ' ' << format_double(h) << '\n';
}

inline spin_glass read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path);
  return parse_instance(in);
}

inline void write_instance(const spin_glass& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file " + path);
  write_instance(out, instance);
}

// Edge list: site count, then one "i j" pair per line.
inline topology parse_topology(std::istream& in) {
  std::size_t line_no = 0;
  topology topo;
  if (!detail::read_header(in, line_no, topo.n_sites)) throw parse_error(line_no, "missing site count");
  std::set<site_pair> seen;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 2) throw parse_error(line_no, "expected 'i j'");
    std::size_t i = detail::parse_index(f[0], line_no);
    std::size_t j = detail::parse_index(f[1], line_no);
    if (i == j) throw parse_error(line_no, "self edge");
    if (i >= topo.n_sites || j >= topo.n_sites) throw parse_error(line_no, "site index out of range");
    if (i > j) std::swap(i, j);
    if (!seen.insert({i, j}).second) throw parse_error(line_no, "duplicate edge");
  }
  topo.edges.assign(seen.begin(), seen.end());
  return topo;
}

inline topology read_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file " + path);
  return parse_topology(in);
}

inline spin_state read_state(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (detail::is_skippable(line)) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 1) throw parameter_error("state file must hold a single bit string");
    return spin_state::from_bit_string(f[0]);
  }
  throw parameter_error("state file is empty");
}

inline nlohmann::json to_json(const iteration_record& r) {
  return {{"stage", to_string(r.phase)},
          {"cycle", r.cycle},
          {"iteration", r.iteration},
          {"lambda", r.lambda},
          {"mask_population", r.mask_population},
          {"selected", r.selected},
          {"reference_energy", r.reference_energy},
          {"sample_best_energy", r.sample_best_energy},
          {"sample_entropy", r.sample_entropy},
          {"best_energy", r.best_energy},
          {"best_state", r.best_state.to_bit_string()},
          {"budget", r.budget},
          {"wall_time_s", r.wall_time_s}};
}

// Re-verifies the best energy against `instance` before emitting.
inline nlohmann::json to_json(const solve_result& result, const spin_glass& instance) {
  const double check = energy(instance, result.best_state);
  if (check != result.best_energy) throw std::logic_error("reported best energy does not match the instance");
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : result.records) records.push_back(to_json(r));
  return {{"schema_version", result_schema_version},
          {"n_sites", instance.n_sites()},
          {"best_energy", result.best_energy},
          {"best_state", result.best_state.to_bit_string()},
          {"termination", to_string(result.reason)},
          {"budget", result.budget},
          {"iterations", records}};
}

inline nlohmann::json to_json(const sample_set& samples) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < samples.size(); ++k)
    rows.push_back({{"state", samples.state(k).to_bit_string()}, {"energy", samples.energy_at(k)}});
  return {{"schema_version", result_schema_version}, {"budget", samples.budget}, {"samples", rows}};
}

// Removes timing fields so two runs can be compared byte for byte.
inline void strip_wall_time(nlohmann::json& j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    j.erase("elapsed_s");
    for (auto& [k, v] : j.items()) strip_wall_time(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_wall_time(v);
  }
}

// Energy-versus-budget trajectory, one row per protocol iteration.
inline void write_trajectory_csv(std::ostream& out, const solve_result& result) {
  out << "stage,cycle,iteration,lambda,mask_population,budget,wall_time_s,sample_best_energy,best_energy\n";
  for (const auto& r : result.records) {
    out << to_string(r.phase) << ',' << r.cycle << ',' << r.iteration << ',' << format_double(r.lambda) << ','
        << r.mask_population << ',' << r.budget << ',' << format_double(r.wall_time_s) << ','
        << format_double(r.sample_best_energy) << ',' << format_double(r.best_energy) << '\n';
  }
}

}  // namespace lda
