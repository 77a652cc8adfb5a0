#pragma once

// Low-energy state generators: single-spin-flip Metropolis annealing, steepest
// greedy descent, and exhaustive enumeration. All of them plug into the
// search protocols through `sampler_fn`.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lda/errors.hpp"
#include "lda/sample_set.hpp"
#include "lda/spin_model.hpp"

namespace lda {

// Draws `n_samples` states for the given instance. Stateful samplers advance
// an internal call counter so successive calls see fresh random streams.
using sampler_fn = std::function<sample_set(const spin_glass&, std::size_t n_samples)>;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// 53-bit uniform double in [0, 1) from raw engine output, independent of the
// standard library's distribution implementations.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class beta_schedule { geometric, linear };

struct sa_config {
  std::size_t sweeps = 1000;
  double beta_start = 0.1;
  double beta_end = 10.0;
  beta_schedule schedule = beta_schedule::geometric;
  std::size_t chains = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 = hardware concurrency

  void validate() const {
    if (chains == 0) throw parameter_error("chains must be positive");
    if (!(beta_start > 0.0) || !(beta_end > 0.0) || !std::isfinite(beta_start) ||
        !std::isfinite(beta_end))
      throw parameter_error("inverse temperatures must be positive and finite");
  }

  // Inverse temperature of sweep k, updated once per sweep.
  double beta_at(std::size_t k) const {
    if (sweeps <= 1) return beta_end;
    const double frac = static_cast<double>(k) / static_cast<double>(sweeps - 1);
    if (schedule == beta_schedule::linear) return beta_start + (beta_end - beta_start) * frac;
    return beta_start * std::pow(beta_end / beta_start, frac);
  }
};

namespace detail {

inline std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t w = requested ? requested : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(w, jobs));
}

// Runs job(k) for k in [0, jobs) on a few threads. Jobs must write to
// disjoint outputs.
template <class Job>
void parallel_for(std::size_t jobs, std::size_t threads, Job&& job) {
  const std::size_t workers = worker_count(threads, jobs);
  if (workers <= 1) {
    for (std::size_t k = 0; k < jobs; ++k) job(k);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < jobs; k += workers) job(k);
    });
  }
  for (auto& t : pool) t.join();
}

inline void anneal_chain(const adjacency& adj, const sa_config& config, std::vector<std::int8_t>& spins,
                         std::mt19937_64& rng) {
  const std::size_t n = spins.size();
  std::vector<double> field(n);
  for (std::size_t i = 0; i < n; ++i) field[i] = adj.local_field(spins, i);
  for (std::size_t sweep = 0; sweep < config.sweeps; ++sweep) {
    const double beta = config.beta_at(sweep);
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = -2.0 * spins[i] * field[i];
      if (delta > 0.0 && uniform01(rng) >= std::exp(-beta * delta)) continue;
      spins[i] = static_cast<std::int8_t>(-spins[i]);
      const double shift = 2.0 * spins[i];
      const auto nb = adj.neighbours(i);
      const auto w = adj.weights(i);
      for (std::size_t k = 0; k < nb.size(); ++k) field[nb[k]] += shift * w[k];
    }
  }
}

}  // namespace detail

// Independent Metropolis chains, one final state per chain. Chain c draws
// from its own stream derived from (seed, c), so the result does not depend
// on the thread count.
inline sample_set sa_sample(const spin_glass& instance, const sa_config& config,
                            const std::optional<spin_state>& initial = std::nullopt) {
  config.validate();
  if (initial) detail::require_same_size(initial->size(), instance.n_sites(), "sa_sample initial");
  const std::size_t n = instance.n_sites();
  const adjacency adj(instance);
  std::vector<std::vector<std::int8_t>> finals(config.chains);

  detail::parallel_for(config.chains, config.threads, [&](std::size_t chain) {
    std::mt19937_64 rng(derive_seed(config.seed, chain));
    std::vector<std::int8_t> spins(n);
    if (initial) {
      const auto src = initial->spins();
      spins.assign(src.begin(), src.end());
    } else {
      for (auto& s : spins) s = (rng() >> 63) ? 1 : -1;
    }
    detail::anneal_chain(adj, config, spins, rng);
    finals[chain] = std::move(spins);
  });

  sample_set out;
  for (auto& spins : finals) {
    spin_state s(std::move(spins));
    const double e = energy(instance, s);
    out.push_back(std::move(s), e);
  }
  out.sort();
  out.budget = static_cast<std::uint64_t>(config.chains) * config.sweeps;
  return out;
}

// Steepest descent over single flips (and, optionally, the global inversion
// move). Ties between equally good moves go to the lowest site index, with
// inversion losing ties.
inline spin_state greedy_descent(const spin_glass& instance, const spin_state& initial,
                                 bool allow_inversion = false) {
  detail::require_same_size(initial.size(), instance.n_sites(), "greedy_descent");
  const std::size_t n = initial.size();
  const adjacency adj(instance);
  std::vector<std::int8_t> spins(initial.spins().begin(), initial.spins().end());
  std::vector<double> field(n);
  for (std::size_t i = 0; i < n; ++i) field[i] = adj.local_field(spins, i);

  // Moves must beat rounding noise in the incrementally updated fields.
  const double threshold = -1e-12 * std::max(1.0, instance.max_abs_strength());
  while (true) {
    double best = threshold;
    std::size_t best_site = n;
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = -2.0 * spins[i] * field[i];
      if (delta < best) {
        best = delta;
        best_site = i;
      }
    }
    if (allow_inversion) {
      double bias_term = 0.0;
      for (std::size_t i = 0; i < n; ++i) bias_term += adj.bias(i) * spins[i];
      const double delta = -2.0 * bias_term;
      if (delta < best) {
        for (auto& s : spins) s = static_cast<std::int8_t>(-s);
        for (std::size_t i = 0; i < n; ++i) field[i] = adj.local_field(spins, i);
        continue;
      }
    }
    if (best_site == n) break;
    spins[best_site] = static_cast<std::int8_t>(-spins[best_site]);
    const double shift = 2.0 * spins[best_site];
    const auto nb = adj.neighbours(best_site);
    const auto w = adj.weights(best_site);
    for (std::size_t k = 0; k < nb.size(); ++k) field[nb[k]] += shift * w[k];
  }
  return spin_state(std::move(spins));
}

inline constexpr std::size_t max_enumeration_sites = 26;

struct enumeration_result {
  sample_set lowest;                    // the k lowest states, exact energies
  double ground_energy = 0.0;
  std::uint64_t ground_degeneracy = 0;  // states within tolerance of the minimum
};

// Scans all 2^N configurations in Gray-code order. Energies are recomputed
// from scratch at the start of every block of 4096 states so incremental
// rounding cannot accumulate.
inline enumeration_result exact_enumerate(const spin_glass& instance, std::size_t k,
                                          double degeneracy_tolerance = 1e-9) {
  const std::size_t n = instance.n_sites();
  if (n > max_enumeration_sites)
    throw capability_error("exhaustive enumeration is limited to " +
                           std::to_string(max_enumeration_sites) + " sites, got " + std::to_string(n));
  if (k == 0) throw parameter_error("k must be positive");
  const std::uint64_t total = std::uint64_t{1} << n;
  const std::size_t keep = static_cast<std::size_t>(std::min<std::uint64_t>(k, total));
  const adjacency adj(instance);

  using entry = std::pair<double, std::uint64_t>;  // (energy, bit index)
  std::priority_queue<entry> heap;                 // max-heap: worst kept on top
  double ground = 0.0;
  std::uint64_t degeneracy = 0;
  const double tol = degeneracy_tolerance * std::max(1.0, instance.max_abs_strength());

  std::vector<std::int8_t> spins(n);
  auto exact_energy = [&] {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e += adj.bias(i) * spins[i];
      const auto nb = adj.neighbours(i);
      const auto w = adj.weights(i);
      for (std::size_t q = 0; q < nb.size(); ++q)
        if (nb[q] > i) e += w[q] * spins[i] * spins[nb[q]];
    }
    return e;
  };

  constexpr std::uint64_t block = 4096;
  double e = 0.0;
  std::uint64_t gray = 0;
  for (std::uint64_t t = 0; t < total; ++t) {
    if (t % block == 0) {
      gray = t ^ (t >> 1);
      for (std::size_t i = 0; i < n; ++i) spins[i] = ((gray >> i) & 1u) ? 1 : -1;
      e = exact_energy();
    } else {
      const auto site = static_cast<std::size_t>(std::countr_zero(t));
      e += adj.flip_delta(spins, site);
      spins[site] = static_cast<std::int8_t>(-spins[site]);
      gray ^= std::uint64_t{1} << site;
    }

    if (degeneracy == 0 || e < ground - tol) {
      ground = e;
      degeneracy = 1;
    } else if (e <= ground + tol) {
      ++degeneracy;
      ground = std::min(ground, e);
    }

    if (heap.size() < keep) {
      heap.emplace(e, gray);
    } else if (entry{e, gray} < heap.top()) {
      heap.pop();
      heap.emplace(e, gray);
    }
  }

  enumeration_result out;
  while (!heap.empty()) {
    spin_state s = spin_state::from_index(heap.top().second, n);
    heap.pop();
    const double exact = energy(instance, s);
    out.lowest.push_back(std::move(s), exact);
  }
  out.lowest.sort();
  out.ground_energy = out.lowest.energy_at(0);
  out.ground_degeneracy = degeneracy;
  return out;
}

// Annealing sampler: n_samples chains per call, fresh stream per call.
struct sa_sampler {
  sa_config config;
  std::uint64_t calls = 0;

  sample_set operator()(const spin_glass& instance, std::size_t n_samples) {
    sa_config c = config;
    c.chains = n_samples;
    c.seed = derive_seed(config.seed, 0x5a5a0000ULL + calls++);
    return sa_sample(instance, c);
  }
};

// Deterministic sampler returning the n lowest states of the instance.
struct exact_sampler {
  sample_set operator()(const spin_glass& instance, std::size_t n_samples) const {
    return exact_enumerate(instance, n_samples).lowest;
  }
};

}  // namespace lda
