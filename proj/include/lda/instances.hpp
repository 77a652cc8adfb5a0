#pragma once

// Topologies and random instance generators. Coupler values are drawn from
// finite sets of exact rationals p/q; the double is only formed when the
// coupler is stored, so generation is reproducible across platforms.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lda/errors.hpp"
#include "lda/spin_model.hpp"

namespace lda {

struct topology {
  std::size_t n_sites = 0;
  std::vector<site_pair> edges;  // i < j, sorted, unique

  void validate() const {
    std::set<site_pair> seen;
    for (const auto& [i, j] : edges) {
      if (i == j) throw parameter_error("self edge on site " + std::to_string(i));
      if (i > j) throw parameter_error("edge (" + std::to_string(i) + ", " + std::to_string(j) + ") is not ordered");
      if (j >= n_sites) throw parameter_error("edge endpoint " + std::to_string(j) + " out of range");
      if (!seen.insert({i, j}).second)
        throw parameter_error("duplicate edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
};

// Triangular lattice on a rows x cols torus: every site links to its right,
// lower and lower-right neighbours (six neighbours in total). On tori with a
// side of 2 some of those coincide and are kept once.
inline topology triangular_topology(std::size_t rows, std::size_t cols) {
  if (rows < 2 || cols < 2) throw parameter_error("triangular lattice needs rows, cols >= 2");
  auto site = [cols](std::size_t r, std::size_t c) { return r * cols + c; };
  std::set<site_pair> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t here = site(r, c);
      const std::size_t targets[] = {site(r, (c + 1) % cols), site((r + 1) % rows, c),
                                     site((r + 1) % rows, (c + 1) % cols)};
      for (std::size_t there : targets) {
        if (there == here) continue;
        edges.insert({std::min(here, there), std::max(here, there)});
      }
    }
  }
  return topology{rows * cols, {edges.begin(), edges.end()}};
}

struct rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const rational&, const rational&) = default;
};

// {+-1/7, +-2/7, ..., +-1}
inline std::vector<rational> nat7_values() {
  std::vector<rational> v;
  for (std::int64_t p = 1; p <= 7; ++p) {
    v.push_back({-p, 7});
    v.push_back({p, 7});
  }
  return v;
}

enum class generator_kind { triangular_pbc, from_topology };

struct generator_spec {
  generator_kind kind = generator_kind::triangular_pbc;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<rational> coupler_values = nat7_values();
  std::vector<rational> bias_values;  // empty = no biases
  std::uint64_t seed = 0;
};

namespace detail {

// Unbiased index in [0, m) from raw 64-bit draws.
inline std::size_t draw_index(std::mt19937_64& rng, std::size_t m) {
  const std::uint64_t range = static_cast<std::uint64_t>(m);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

}  // namespace detail

inline spin_glass generate_on_topology(const topology& topo, const generator_spec& spec) {
  topo.validate();
  if (spec.coupler_values.empty()) throw parameter_error("coupler value set is empty");
  for (const auto& r : spec.coupler_values)
    if (r.den == 0) throw parameter_error("coupler value with zero denominator");
  std::mt19937_64 rng(spec.seed);
  spin_glass::coupler_map couplers;
  for (const auto& e : topo.edges)
    couplers.emplace(e, spec.coupler_values[detail::draw_index(rng, spec.coupler_values.size())].value());
  spin_glass::bias_map biases;
  if (!spec.bias_values.empty()) {
    for (std::size_t i = 0; i < topo.n_sites; ++i)
      biases.emplace(i, spec.bias_values[detail::draw_index(rng, spec.bias_values.size())].value());
  }
  return spin_glass(topo.n_sites, std::move(couplers), std::move(biases));
}

inline spin_glass generate_triangular(std::size_t rows, std::size_t cols, const generator_spec& spec) {
  return generate_on_topology(triangular_topology(rows, cols), spec);
}

inline spin_glass generate(const generator_spec& spec, const topology* topo = nullptr) {
  if (spec.kind == generator_kind::triangular_pbc) return generate_triangular(spec.rows, spec.cols, spec);
  if (!topo) throw parameter_error("from-topology generation needs a topology");
  return generate_on_topology(*topo, spec);
}

}  // namespace lda
