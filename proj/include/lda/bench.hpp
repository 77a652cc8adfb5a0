#pragma once

// Equal-budget comparison of the hybrid solver against plain annealing.
//
// Both methods start from the same initial state (the best of one short
// annealing call) and may spend the same number of sweeps. "sa" repeats the
// sampler call used inside the hybrid solver on the unmodified instance;
// "sa-long" spends the whole budget on n_samples long chains.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "lda/io.hpp"
#include "lda/protocols.hpp"
#include "lda/samplers.hpp"

namespace lda {

struct bench_config {
  hybrid_params solver;
  sa_config sampler;               // per-call annealing; chains set by n_samples
  std::size_t initial_sweeps = 10;  // short anneal producing the shared start
  bool long_baseline = true;
};

struct bench_row {
  std::string instance;
  std::string method;
  std::uint64_t seed = 0;
  double final_energy = 0.0;
  double initial_energy = 0.0;
  std::uint64_t budget = 0;
  double elapsed_s = 0.0;
  std::string best_state;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Re-evaluates the reported state before it leaves the harness.
inline bench_row verified_row(const spin_glass& instance, bench_row row, const spin_state& best) {
  if (energy(instance, best) != row.final_energy)
    throw std::logic_error("bench energy for " + row.instance + "/" + row.method + " does not verify");
  row.best_state = best.to_bit_string();
  return row;
}

}  // namespace detail

inline spin_state bench_initial_state(const spin_glass& instance, const bench_config& config, std::uint64_t seed) {
  sa_config c = config.sampler;
  c.sweeps = config.initial_sweeps;
  c.chains = config.solver.local.n_samples;
  c.seed = derive_seed(seed, 0x1a17ULL);
  return sa_sample(instance, c).state(0);
}

inline std::vector<bench_row> run_bench_case(const std::string& name, const spin_glass& instance,
                                             const bench_config& config, std::uint64_t seed) {
  const spin_state initial = bench_initial_state(instance, config, seed);
  const double initial_energy = energy(instance, initial);
  std::vector<bench_row> rows;

  auto start = std::chrono::steady_clock::now();
  sa_sampler sampler{config.sampler, 0};
  sampler.config.seed = derive_seed(seed, 0x11daULL);
  const solve_result lda_result = hybrid_solve(instance, initial, config.solver, sampler);
  const std::uint64_t budget = lda_result.budget;
  rows.push_back(detail::verified_row(instance,
                                      {name, "lda", seed, lda_result.best_energy, initial_energy, budget,
                                       detail::seconds_since(start), {}},
                                      lda_result.best_state));

  // repeated calls of the same shape on the unmodified instance
  start = std::chrono::steady_clock::now();
  const std::size_t chains = config.solver.local.n_samples;
  const std::uint64_t per_call = static_cast<std::uint64_t>(chains) * config.sampler.sweeps;
  sa_sampler plain{config.sampler, 0};
  plain.config.seed = derive_seed(seed, 0x5aULL);
  spin_state best = initial;
  double best_energy = initial_energy;
  std::uint64_t spent = 0;
  while (per_call > 0 && spent + per_call <= budget) {
    const sample_set s = plain(instance, chains);
    spent += s.budget;
    if (s.energy_at(0) < best_energy) {
      best_energy = s.energy_at(0);
      best = s.state(0);
    }
  }
  rows.push_back(detail::verified_row(
      instance, {name, "sa", seed, best_energy, initial_energy, spent, detail::seconds_since(start), {}}, best));

  if (config.long_baseline) {
    start = std::chrono::steady_clock::now();
    sa_config c = config.sampler;
    c.chains = chains;
    c.sweeps = static_cast<std::size_t>(budget / chains);
    c.seed = derive_seed(seed, 0x10ULL);
    spin_state long_best = initial;
    double long_energy = initial_energy;
    std::uint64_t long_spent = 0;
    if (c.sweeps > 0) {
      const sample_set s = sa_sample(instance, c, initial);
      long_spent = s.budget;
      if (s.energy_at(0) < long_energy) {
        long_energy = s.energy_at(0);
        long_best = s.state(0);
      }
    }
    rows.push_back(detail::verified_row(instance,
                                        {name, "sa-long", seed, long_energy, initial_energy, long_spent,
                                         detail::seconds_since(start), {}},
                                        long_best));
  }
  return rows;
}

inline void sort_rows(std::vector<bench_row>& rows) {
  std::sort(rows.begin(), rows.end(), [](const bench_row& a, const bench_row& b) {
    return std::tie(a.instance, a.seed, a.method) < std::tie(b.instance, b.seed, b.method);
  });
}

inline void write_bench_csv(std::ostream& out, const std::vector<bench_row>& rows) {
  out << "instance,method,seed,final_energy,initial_energy,budget,elapsed_s,best_state\n";
  for (const auto& r : rows)
    out << r.instance << ',' << r.method << ',' << r.seed << ',' << format_double(r.final_energy) << ','
        << format_double(r.initial_energy) << ',' << r.budget << ',' << format_double(r.elapsed_s) << ','
        << r.best_state << '\n';
}

inline nlohmann::json bench_json(const std::vector<bench_row>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"instance", r.instance},
                   {"method", r.method},
                   {"seed", r.seed},
                   {"final_energy", r.final_energy},
                   {"initial_energy", r.initial_energy},
                   {"budget", r.budget},
                   {"elapsed_s", r.elapsed_s},
                   {"best_state", r.best_state}});
  return {{"schema_version", result_schema_version}, {"rows", arr}};
}

}  // namespace lda
