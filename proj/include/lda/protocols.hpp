#pragma once

// Local search, global search and their alternation into a hybrid solver.
// Every protocol is written against `sampler_fn`, and every energy it reports
// is evaluated on the original instance, never on the deformed Hamiltonian.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lda/feature_hamiltonian.hpp"
#include "lda/sample_set.hpp"
#include "lda/samplers.hpp"
#include "lda/spin_model.hpp"

namespace lda {

enum class termination { converged, iteration_cap, budget_cap };

inline const char* to_string(termination t) {
  switch (t) {
    case termination::converged: return "converged";
    case termination::iteration_cap: return "iteration-cap";
    case termination::budget_cap: return "budget-cap";
  }
  return "unknown";
}

enum class stage { initial, local, global };

inline const char* to_string(stage s) {
  switch (s) {
    case stage::initial: return "initial";
    case stage::local: return "local";
    case stage::global: return "global";
  }
  return "unknown";
}

struct iteration_record {
  stage phase = stage::initial;
  std::size_t cycle = 0;
  std::size_t iteration = 0;
  double lambda = 0.0;
  std::size_t mask_population = 0;  // mask used to build this iteration's Hamiltonian
  std::size_t selected = 0;         // |T|
  double reference_energy = 0.0;
  double sample_best_energy = 0.0;  // lowest original-instance energy among the samples
  double sample_entropy = 0.0;      // nats, over distinct sampled states
  spin_state best_state;            // best so far over the whole run
  double best_energy = 0.0;
  std::uint64_t budget = 0;         // cumulative sampler budget
  double wall_time_s = 0.0;         // since the start of the run
};

struct solve_result {
  spin_state best_state;
  double best_energy = std::numeric_limits<double>::infinity();
  std::vector<iteration_record> records;
  termination reason = termination::iteration_cap;
  std::uint64_t budget = 0;
};

// Thrown when a sampler call fails; carries where in the run it happened.
class sampler_failure : public std::runtime_error {
 public:
  sampler_failure(stage phase, std::size_t iteration, const std::string& what)
      : std::runtime_error(std::string(to_string(phase)) + " iteration " + std::to_string(iteration) +
                           ": sampler failed: " + what) {}
};

// Shared bookkeeping for one solve: the clock, the cumulative budget and the
// best-so-far state.
class search_log {
 public:
  explicit search_log(std::uint64_t max_budget = 0)
      : start_(std::chrono::steady_clock::now()), max_budget_(max_budget) {}

  void offer(const spin_state& s, double e) {
    if (e < best_energy_) {
      best_energy_ = e;
      best_state_ = s;
    }
  }

  bool budget_exhausted() const { return max_budget_ != 0 && budget_ >= max_budget_; }

  sample_set draw(sampler_fn& sampler, const spin_glass& hamiltonian, std::size_t n, stage phase,
                  std::size_t iteration) {
    sample_set s;
    try {
      s = sampler(hamiltonian, n);
    } catch (const std::exception& e) {
      throw sampler_failure(phase, iteration, e.what());
    }
    budget_ += s.budget;
    return s;
  }

  void record(iteration_record r) {
    r.best_state = best_state_;
    r.best_energy = best_energy_;
    r.budget = budget_;
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    records_.push_back(std::move(r));
  }

  solve_result finish(termination reason) const {
    return solve_result{best_state_, best_energy_, records_, reason, budget_};
  }

  std::uint64_t budget() const noexcept { return budget_; }
  std::size_t cycle = 0;

 private:
  std::chrono::steady_clock::time_point start_;
  std::uint64_t max_budget_;
  std::uint64_t budget_ = 0;
  spin_state best_state_;
  double best_energy_ = std::numeric_limits<double>::infinity();
  std::vector<iteration_record> records_;
};

namespace detail {

// Original-energy ties closer than this count as "no change" when deciding
// whether the local search reference moved.
inline double energy_tie_tolerance(const spin_glass& instance) {
  return 1e-9 * std::max(1.0, instance.max_abs_strength());
}

struct stage_outcome {
  spin_state best_state;
  double best_energy = 0.0;
  termination reason = termination::iteration_cap;
};

inline stage_outcome run_local(const spin_glass& instance, const spin_state& initial, const protocol_params& params,
                               sampler_fn& sampler, search_log& log, const std::vector<exclusion>& exclusions) {
  params.validate();
  require_same_size(initial.size(), instance.n_sites(), "local_search initial state");
  const double tie = energy_tie_tolerance(instance);

  spin_state reference = initial;
  double reference_energy = energy(instance, reference);
  stage_outcome out{reference, reference_energy, termination::iteration_cap};
  log.offer(reference, reference_energy);
  bit_mask mask = bit_mask::ones(instance.n_sites());

  for (std::size_t i = 0; i < params.iterations; ++i) {
    if (log.budget_exhausted()) {
      out.reason = termination::budget_cap;
      return out;
    }
    const double lambda = lambda_at(i, params);
    const spin_glass hfm = build_hfm(instance, feature_spec{reference, mask, lambda});
    const sample_set samples =
        log.draw(sampler, hfm, params.n_samples, stage::local, i).rescored(instance);
    const sample_set selected = select_samples(instance, samples, params.n_select, params.q_select, exclusions);

    iteration_record rec;
    rec.phase = stage::local;
    rec.cycle = log.cycle;
    rec.iteration = i;
    rec.lambda = lambda;
    rec.mask_population = mask.count();
    rec.selected = selected.size();
    rec.reference_energy = reference_energy;
    rec.sample_best_energy = samples.empty() ? reference_energy : samples.energy_at(0);
    rec.sample_entropy = samples.entropy();

    mask = selected.empty() ? bit_mask::zeros(instance.n_sites()) : update_mask(selected);
    spin_state next = reference;
    double next_energy = reference_energy;
    if (!samples.empty() && std::abs(samples.energy_at(0) - reference_energy) > tie) {
      next = samples.state(0);
      next_energy = samples.energy_at(0);
    }
    log.offer(next, next_energy);
    if (next_energy < out.best_energy) {
      out.best_state = next;
      out.best_energy = next_energy;
    }
    log.record(std::move(rec));

    if (next == reference) {
      out.reason = termination::converged;
      return out;
    }
    reference = std::move(next);
    reference_energy = next_energy;
  }
  return out;
}

inline stage_outcome run_global(const spin_glass& instance, const spin_state& local_min, const protocol_params& params,
                                sampler_fn& sampler, search_log& log, const std::vector<exclusion>& prior) {
  params.validate();
  require_same_size(local_min.size(), instance.n_sites(), "global_search local minimum");
  const double anchor_energy = energy(instance, local_min);
  stage_outcome out{local_min, anchor_energy, termination::iteration_cap};
  log.offer(local_min, anchor_energy);

  std::vector<exclusion> exclusions{{local_min, params.q_exclude}};
  exclusions.insert(exclusions.end(), prior.begin(), prior.end());
  bit_mask mask = bit_mask::zeros(instance.n_sites());

  for (std::size_t i = 0; i < params.iterations; ++i) {
    if (log.budget_exhausted()) {
      out.reason = termination::budget_cap;
      return out;
    }
    const spin_glass hfm = build_hfm(instance, feature_spec{local_min, mask, params.global_lambda});
    const sample_set samples =
        log.draw(sampler, hfm, params.n_samples, stage::global, i).rescored(instance);
    const sample_set selected = select_samples(instance, samples, params.n_select, params.q_select, exclusions);

    iteration_record rec;
    rec.phase = stage::global;
    rec.cycle = log.cycle;
    rec.iteration = i;
    rec.lambda = params.global_lambda;
    rec.mask_population = mask.count();
    rec.selected = selected.size();
    rec.reference_energy = anchor_energy;
    rec.sample_best_energy = samples.empty() ? anchor_energy : samples.energy_at(0);
    rec.sample_entropy = samples.entropy();

    std::vector<spin_state> voters = selected.states();
    voters.push_back(local_min);
    mask = update_mask(voters);

    const bool improved = !selected.empty() && selected.energy_at(0) < anchor_energy;
    if (improved) {
      out.best_state = selected.state(0);
      out.best_energy = selected.energy_at(0);
      out.reason = termination::converged;
      log.offer(out.best_state, out.best_energy);
    }
    log.record(std::move(rec));
    if (improved) return out;
  }
  return out;
}

}  // namespace detail

// Converges from `initial` towards a nearby local minimum. The mask starts
// all-ones and lambda follows the geometric schedule; stops once the lowest
// sampled state no longer changes the reference.
inline solve_result local_search(const spin_glass& instance, const spin_state& initial,
                                 const protocol_params& params, sampler_fn sampler,
                                 const std::vector<exclusion>& exclusions = {}) {
  search_log log(params.max_budget);
  const auto out = detail::run_local(instance, initial, params, sampler, log, exclusions);
  return log.finish(out.reason);
}

// Escapes from `local_min` towards a lower valley. Starts from H_P (mask all
// zeros) and grows the mask from states agreeing with `local_min`; candidates
// too similar to `local_min` or any prior exclusion are never selected.
inline solve_result global_search(const spin_glass& instance, const spin_state& local_min,
                                  const protocol_params& params, sampler_fn sampler,
                                  const std::vector<exclusion>& exclusions = {}) {
  search_log log(params.max_budget);
  const auto out = detail::run_global(instance, local_min, params, sampler, log, exclusions);
  return log.finish(out.reason);
}

struct hybrid_params {
  protocol_params local;
  protocol_params global;
  std::size_t cycles = 4;
  std::size_t max_exclusions = 16;  // most recent local minima kept as exclusions
  std::uint64_t max_budget = 0;     // whole-run cap, 0 = unlimited
};

// Alternates local and global search for `cycles` cycles. Without an initial
// state, one sampler call on the unmodified instance supplies it.
inline solve_result hybrid_solve(const spin_glass& instance, const std::optional<spin_state>& initial,
                                 const hybrid_params& params, sampler_fn sampler) {
  params.local.validate();
  params.global.validate();
  search_log log(params.max_budget);

  spin_state current;
  if (initial) {
    detail::require_same_size(initial->size(), instance.n_sites(), "hybrid_solve initial state");
    current = *initial;
  } else {
    const sample_set s = log.draw(sampler, instance, params.local.n_samples, stage::initial, 0).rescored(instance);
    if (s.empty()) throw sampler_failure(stage::initial, 0, "no samples returned");
    current = s.state(0);
  }
  const double initial_energy = energy(instance, current);
  log.offer(current, initial_energy);
  iteration_record first;
  first.reference_energy = initial_energy;
  first.sample_best_energy = initial_energy;
  log.record(std::move(first));

  std::vector<exclusion> minima;
  termination reason = termination::iteration_cap;
  for (std::size_t c = 0; c < params.cycles; ++c) {
    log.cycle = c;
    const auto local = detail::run_local(instance, current, params.local, sampler, log, {});
    if (local.reason == termination::budget_cap) {
      reason = termination::budget_cap;
      break;
    }
    const auto global = detail::run_global(instance, local.best_state, params.global, sampler, log, minima);
    minima.push_back({local.best_state, params.global.q_exclude});
    if (minima.size() > params.max_exclusions) minima.erase(minima.begin());
    if (global.reason == termination::budget_cap) {
      reason = termination::budget_cap;
      break;
    }
    current = global.best_state;
  }
  return log.finish(reason);
}

}  // namespace lda
