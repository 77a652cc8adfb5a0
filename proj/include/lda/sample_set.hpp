#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lda/spin_model.hpp"

namespace lda {

// States with energies under one designated instance, kept sorted ascending
// by (energy, bit string). `budget` counts the sampler work that produced the
// set (full-lattice sweeps for annealers, 0 where not meaningful).
class sample_set {
 public:
  sample_set() = default;

  void push_back(spin_state state, double e) {
    states_.push_back(std::move(state));
    energies_.push_back(e);
  }

  // Stable, so equal (energy, state) entries keep insertion order.
  void sort() {
    std::vector<std::size_t> order(states_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (energies_[a] != energies_[b]) return energies_[a] < energies_[b];
      return states_[a] < states_[b];
    });
    std::vector<spin_state> states;
    std::vector<double> energies;
    states.reserve(order.size());
    energies.reserve(order.size());
    for (auto k : order) {
      states.push_back(std::move(states_[k]));
      energies.push_back(energies_[k]);
    }
    states_ = std::move(states);
    energies_ = std::move(energies);
  }

  // Same states re-evaluated under `instance`, sorted.
  sample_set rescored(const spin_glass& instance) const {
    sample_set out;
    out.budget = budget;
    out.states_.reserve(states_.size());
    out.energies_.reserve(states_.size());
    for (const auto& s : states_) out.push_back(s, energy(instance, s));
    out.sort();
    return out;
  }

  std::size_t size() const noexcept { return states_.size(); }
  bool empty() const noexcept { return states_.empty(); }
  const std::vector<spin_state>& states() const noexcept { return states_; }
  const std::vector<double>& energies() const noexcept { return energies_; }
  const spin_state& state(std::size_t k) const { return states_[k]; }
  double energy_at(std::size_t k) const { return energies_[k]; }

  bool is_sorted() const {
    for (std::size_t k = 1; k < size(); ++k) {
      if (energies_[k] < energies_[k - 1]) return false;
      if (energies_[k] == energies_[k - 1] && states_[k] < states_[k - 1]) return false;
    }
    return true;
  }

  // Shannon entropy (nats) of the empirical distribution over distinct states.
  double entropy() const {
    if (states_.empty()) return 0.0;
    std::vector<spin_state> sorted = states_;
    std::sort(sorted.begin(), sorted.end());
    double h = 0.0;
    const double n = static_cast<double>(sorted.size());
    for (std::size_t k = 0; k < sorted.size();) {
      std::size_t run = k;
      while (run < sorted.size() && sorted[run] == sorted[k]) ++run;
      const double p = static_cast<double>(run - k) / n;
      h -= p * std::log(p);
      k = run;
    }
    return h;
  }

  std::uint64_t budget = 0;

 private:
  std::vector<spin_state> states_;
  std::vector<double> energies_;
};

}  // namespace lda
