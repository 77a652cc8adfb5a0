#pragma once

// Feature Hamiltonian H_F(alpha), the masked mixture H_FM(alpha, M, lambda),
// and the per-iteration helpers used by the search protocols.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lda/errors.hpp"
#include "lda/sample_set.hpp"
#include "lda/spin_model.hpp"

namespace lda {

class bit_mask {
 public:
  bit_mask() = default;
  explicit bit_mask(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}
  explicit bit_mask(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
  }

  static bit_mask ones(std::size_t n) { return bit_mask(n, true); }
  static bit_mask zeros(std::size_t n) { return bit_mask(n, false); }

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto b : bits_) c += b;
    return c;
  }

  // m_{N-1} ... m_0
  std::string to_string() const {
    std::string out(bits_.size(), '0');
    for (std::size_t k = 0; k < bits_.size(); ++k) out[bits_.size() - 1 - k] = bits_[k] ? '1' : '0';
    return out;
  }

  friend bool operator==(const bit_mask&, const bit_mask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct feature_spec {
  spin_state reference;
  bit_mask mask;
  double mixing = 0.0;
};

struct protocol_params {
  std::size_t n_samples = 20;   // N_S
  std::size_t n_select = 5;     // N_T
  double q_select = 0.98;       // Q_T
  double q_exclude = 0.9;       // Q_alpha*
  double lambda_start = 0.2;    // local search
  double lambda_end = 1.0;
  double global_lambda = 1.0;   // fixed mixing during global search
  std::size_t iterations = 8;   // I
  std::uint64_t max_budget = 0; // sampler budget cap, 0 = unlimited

  void validate() const {
    if (n_samples == 0) throw parameter_error("n_samples must be positive");
    if (n_select == 0 || n_select > n_samples)
      throw parameter_error("n_select must be in [1, n_samples]");
    if (iterations == 0) throw parameter_error("iterations must be positive");
    auto unit = [](double v, const char* name) {
      if (!(v >= 0.0 && v <= 1.0)) throw parameter_error(std::string(name) + " must lie in [0, 1]");
    };
    unit(q_select, "q_select");
    unit(q_exclude, "q_exclude");
    unit(lambda_start, "lambda_start");
    unit(lambda_end, "lambda_end");
    unit(global_lambda, "global_lambda");
  }
};

// A state to keep away from: candidates with q_f(state, candidate) above
// max_similarity are rejected.
struct exclusion {
  spin_state state;
  double max_similarity = 1.0;
};

namespace detail {

// Adds the expansion of K_ij = -(|J|/2)[a_i a_j s_i s_j + a_i s_i + a_j s_j]
// scaled by `weight`; the coupler part is summed onto `coupler_base`.
inline void add_feature_coupler(spin_glass& out, std::size_t i, std::size_t j, double coupling,
                                const spin_state& reference, double weight, double coupler_base) {
  const double k = -0.5 * std::abs(coupling) * weight;
  out.set_coupler(i, j, coupler_base + k * reference[i] * reference[j]);
  out.add_bias(i, k * reference[i]);
  out.add_bias(j, k * reference[j]);
}

}  // namespace detail

// Keeps only the terms satisfied by `reference`; satisfied couplers are
// replaced by the symmetry-lifting K_ij terms. `reference` is a ground state
// of the result.
inline spin_glass build_feature_hamiltonian(const spin_glass& instance, const spin_state& reference) {
  detail::require_same_size(reference.size(), instance.n_sites(), "build_feature_hamiltonian");
  spin_glass out(instance.n_sites());
  for (const auto& [key, j] : instance.couplers()) {
    if (j * reference[key.first] * reference[key.second] < 0.0)
      detail::add_feature_coupler(out, key.first, key.second, j, reference, 1.0, 0.0);
  }
  for (const auto& [i, h] : instance.biases()) {
    if (h * reference[i] < 0.0) out.add_bias(i, h);
  }
  return out;
}

// H_FM = H_F(alpha, M) + H_P(M). Masked terms (both endpoints masked for a
// coupler) are blended as (1 - lambda) H_P + lambda H_F; everything else is
// the original term.
inline spin_glass build_hfm(const spin_glass& instance, const feature_spec& spec) {
  const std::size_t n = instance.n_sites();
  detail::require_same_size(spec.reference.size(), n, "build_hfm reference");
  detail::require_same_size(spec.mask.size(), n, "build_hfm mask");
  const double lambda = spec.mixing;
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw parameter_error("mixing strength must lie in [0, 1]");
  const spin_state& ref = spec.reference;

  spin_glass out(n);
  for (const auto& [key, j] : instance.couplers()) {
    const auto [a, b] = key;
    if (spec.mask[a] && spec.mask[b]) {
      if (j * ref[a] * ref[b] < 0.0)
        detail::add_feature_coupler(out, a, b, j, ref, lambda, (1.0 - lambda) * j);
      else
        out.set_coupler(a, b, (1.0 - lambda) * j);
    } else {
      out.set_coupler(a, b, j);
    }
  }
  for (const auto& [i, h] : instance.biases()) {
    if (spec.mask[i] && !(h * ref[i] < 0.0))
      out.add_bias(i, (1.0 - lambda) * h);
    else
      out.add_bias(i, h);
  }
  return out;
}

// Geometric mixing schedule lambda_s (lambda_f / lambda_s)^(i / (I - 1)).
inline double lambda_at(std::size_t iteration, const protocol_params& params) {
  const double ls = params.lambda_start;
  const double lf = params.lambda_end;
  if (!(ls > 0.0) || !(lf > 0.0)) throw parameter_error("geometric lambda schedule needs positive endpoints");
  if (params.iterations == 0 || iteration >= params.iterations)
    throw parameter_error("iteration index outside the schedule");
  if (params.iterations == 1 || iteration == 0) return ls;
  if (iteration + 1 == params.iterations) return lf;
  const double frac = static_cast<double>(iteration) / static_cast<double>(params.iterations - 1);
  return ls * std::pow(lf / ls, frac);
}

// Greedy pass over `samples` in the given order. A candidate is accepted
// while fewer than n_select states are held, its q_f similarity from every
// held state is at most q_select, and it respects every exclusion.
inline sample_set select_samples(const spin_glass& instance, const sample_set& samples,
                                 std::size_t n_select, double q_select,
                                 const std::vector<exclusion>& exclusions = {}) {
  sample_set selected;
  for (std::size_t k = 0; k < samples.size() && selected.size() < n_select; ++k) {
    const spin_state& candidate = samples.state(k);
    bool accept = true;
    for (const auto& held : selected.states()) {
      if (q_f(instance, held, candidate) > q_select) {
        accept = false;
        break;
      }
    }
    for (std::size_t x = 0; accept && x < exclusions.size(); ++x) {
      if (q_f(instance, exclusions[x].state, candidate) > exclusions[x].max_similarity) accept = false;
    }
    if (accept) selected.push_back(candidate, samples.energy_at(k));
  }
  return selected;
}

inline bit_mask update_mask(const std::vector<spin_state>& selected) {
  if (selected.empty()) throw parameter_error("update_mask needs at least one state");
  const std::size_t n = selected.front().size();
  std::vector<long> sums(n, 0);
  for (const auto& s : selected) {
    detail::require_same_size(s.size(), n, "update_mask");
    for (std::size_t i = 0; i < n; ++i) sums[i] += s[i];
  }
  bit_mask mask(n);
  const long votes = static_cast<long>(selected.size());
  for (std::size_t i = 0; i < n; ++i) mask.set(i, std::labs(sums[i]) == votes);
  return mask;
}

inline bit_mask update_mask(const sample_set& selected) { return update_mask(selected.states()); }

// Walks from `reference` to `target`, each step flipping the lowest-indexed
// differing site, and returns the H_F(reference) energy of every state on the
// way (both endpoints included).
inline std::vector<double> monotone_path(const spin_glass& instance, const spin_state& reference,
                                         const spin_state& target) {
  detail::require_same_size(reference.size(), instance.n_sites(), "monotone_path");
  detail::require_same_size(target.size(), instance.n_sites(), "monotone_path");
  const spin_glass feature = build_feature_hamiltonian(instance, reference);
  spin_state current = reference;
  std::vector<double> energies{energy(feature, current)};
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (current[i] != target[i]) {
      current.flip(i);
      energies.push_back(energy(feature, current));
    }
  }
  return energies;
}

}  // namespace lda
