#pragma once

// Ising spin-glass data model: instances, spin states, energies, satisfied
// term sets and the two state-similarity measures (q_EA overlap and the
// feature similarity q_F).

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lda/errors.hpp"

namespace lda {

using site_pair = std::pair<std::size_t, std::size_t>;

// Sparse Ising instance H = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i.
// Coupler keys are kept ordered (i < j), so iteration is in ascending key
// order everywhere.
class spin_glass {
 public:
  using coupler_map = std::map<site_pair, double>;
  using bias_map = std::map<std::size_t, double>;

  spin_glass() = default;
  explicit spin_glass(std::size_t n_sites) : n_sites_(n_sites) {}

  spin_glass(std::size_t n_sites, coupler_map couplers, bias_map biases)
      : n_sites_(n_sites), couplers_(std::move(couplers)), biases_(std::move(biases)) {
    for (const auto& [key, value] : couplers_) check_pair(key.first, key.second);
    for (const auto& [i, value] : biases_) check_site(i);
  }

  std::size_t n_sites() const noexcept { return n_sites_; }
  const coupler_map& couplers() const noexcept { return couplers_; }
  const bias_map& biases() const noexcept { return biases_; }

  // Overwrites any existing value. Accepts (i, j) in either order.
  void set_coupler(std::size_t i, std::size_t j, double value) {
    if (i > j) std::swap(i, j);
    check_pair(i, j);
    couplers_[{i, j}] = value;
  }

  void add_coupler(std::size_t i, std::size_t j, double value) {
    if (i > j) std::swap(i, j);
    check_pair(i, j);
    couplers_[{i, j}] += value;
  }

  void set_bias(std::size_t i, double value) {
    check_site(i);
    biases_[i] = value;
  }

  void add_bias(std::size_t i, double value) {
    check_site(i);
    biases_[i] += value;
  }

  double coupler(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    auto it = couplers_.find({i, j});
    return it == couplers_.end() ? 0.0 : it->second;
  }

  double bias(std::size_t i) const {
    auto it = biases_.find(i);
    return it == biases_.end() ? 0.0 : it->second;
  }

  // Largest |J_ij| or |h_i|; zero for an empty instance.
  double max_abs_strength() const {
    double m = 0.0;
    for (const auto& [k, v] : couplers_) m = std::max(m, std::abs(v));
    for (const auto& [k, v] : biases_) m = std::max(m, std::abs(v));
    return m;
  }

  // Term-by-term equality, treating stored zeros as absent.
  friend bool same_terms(const spin_glass& a, const spin_glass& b) {
    if (a.n_sites_ != b.n_sites_) return false;
    for (const auto& [k, v] : a.couplers_)
      if (b.coupler(k.first, k.second) != v) return false;
    for (const auto& [k, v] : b.couplers_)
      if (a.coupler(k.first, k.second) != v) return false;
    for (const auto& [i, v] : a.biases_)
      if (b.bias(i) != v) return false;
    for (const auto& [i, v] : b.biases_)
      if (a.bias(i) != v) return false;
    return true;
  }

  friend bool operator==(const spin_glass& a, const spin_glass& b) { return same_terms(a, b); }

 private:
  void check_site(std::size_t i) const {
    if (i >= n_sites_) {
      throw dimension_error("site " + std::to_string(i) + " out of range for " +
                            std::to_string(n_sites_) + " sites");
    }
  }
  void check_pair(std::size_t i, std::size_t j) const {
    if (i == j) throw dimension_error("coupler on a single site " + std::to_string(i));
    check_site(i);
    check_site(j);
  }

  std::size_t n_sites_ = 0;
  coupler_map couplers_;
  bias_map biases_;
};

// Configuration of +-1 spins. The bit form is a_i = (1 + s_i) / 2; the string
// form lists a_{N-1} ... a_0, most significant site first.
class spin_state {
 public:
  spin_state() = default;
  explicit spin_state(std::size_t n, std::int8_t value = 1) : spins_(n, value) { check_all(); }
  spin_state(std::initializer_list<int> spins) : spins_(spins.begin(), spins.end()) {
    check_all();
  }
  explicit spin_state(std::vector<std::int8_t> spins) : spins_(std::move(spins)) { check_all(); }

  // Bit i of `bits` is a_i.
  static spin_state from_index(std::uint64_t bits, std::size_t n) {
    spin_state s(n);
    for (std::size_t i = 0; i < n; ++i) s.spins_[i] = ((bits >> i) & 1u) ? 1 : -1;
    return s;
  }

  static spin_state from_bit_string(std::string_view text) {
    spin_state s(text.size());
    for (std::size_t k = 0; k < text.size(); ++k) {
      const char c = text[text.size() - 1 - k];
      if (c != '0' && c != '1') throw parameter_error("bit string must contain only 0 and 1");
      s.spins_[k] = c == '1' ? 1 : -1;
    }
    return s;
  }

  std::size_t size() const noexcept { return spins_.size(); }
  std::int8_t operator[](std::size_t i) const { return spins_[i]; }
  int bit(std::size_t i) const { return (1 + spins_[i]) / 2; }
  std::span<const std::int8_t> spins() const noexcept { return spins_; }

  void flip(std::size_t i) { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }
  void set(std::size_t i, std::int8_t v) {
    spins_[i] = v;
    check(v);
  }

  spin_state flipped(std::size_t i) const {
    spin_state s = *this;
    s.flip(i);
    return s;
  }

  spin_state inverted() const {
    spin_state s = *this;
    for (auto& v : s.spins_) v = static_cast<std::int8_t>(-v);
    return s;
  }

  std::string to_bit_string() const {
    std::string out(spins_.size(), '0');
    for (std::size_t k = 0; k < spins_.size(); ++k)
      out[spins_.size() - 1 - k] = spins_[k] > 0 ? '1' : '0';
    return out;
  }

  // Only meaningful for n <= 64.
  std::uint64_t to_index() const {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < spins_.size() && i < 64; ++i)
      if (spins_[i] > 0) bits |= std::uint64_t{1} << i;
    return bits;
  }

  friend bool operator==(const spin_state&, const spin_state&) = default;

  // Orders as the binary number a_{N-1} ... a_0.
  friend std::strong_ordering operator<=>(const spin_state& a, const spin_state& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    for (std::size_t k = a.size(); k-- > 0;) {
      if (a.spins_[k] != b.spins_[k]) return a.spins_[k] <=> b.spins_[k];
    }
    return std::strong_ordering::equal;
  }

 private:
  static void check(std::int8_t v) {
    if (v != 1 && v != -1) throw parameter_error("spins must be +1 or -1");
  }
  void check_all() const {
    for (auto v : spins_) check(v);
  }

  std::vector<std::int8_t> spins_;
};

struct satisfied_sets {
  std::set<site_pair> couplers;
  std::set<std::size_t> biases;

  friend bool operator==(const satisfied_sets&, const satisfied_sets&) = default;
};

inline double energy(const spin_glass& instance, const spin_state& state) {
  detail::require_same_size(state.size(), instance.n_sites(), "energy");
  double e = 0.0;
  for (const auto& [key, j] : instance.couplers()) e += j * state[key.first] * state[key.second];
  for (const auto& [i, h] : instance.biases()) e += h * state[i];
  return e;
}

inline satisfied_sets find_satisfied(const spin_glass& instance, const spin_state& state) {
  detail::require_same_size(state.size(), instance.n_sites(), "satisfied_sets");
  satisfied_sets out;
  for (const auto& [key, j] : instance.couplers())
    if (j * state[key.first] * state[key.second] < 0.0) out.couplers.insert(key);
  for (const auto& [i, h] : instance.biases())
    if (h * state[i] < 0.0) out.biases.insert(i);
  return out;
}

inline double q_ea(const spin_state& a, const spin_state& b) {
  detail::require_same_size(a.size(), b.size(), "q_ea");
  if (a.size() == 0) return 1.0;
  long sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return static_cast<double>(sum) / static_cast<double>(a.size());
}

inline std::size_t hamming(const spin_state& a, const spin_state& b) {
  detail::require_same_size(a.size(), b.size(), "hamming");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// Weighted fraction of the terms satisfied by `reference` that `other` also
// satisfies with the same spin orientation. Asymmetric in its arguments.
// Returns 1 when the reference satisfies nothing.
inline double q_f(const spin_glass& instance, const spin_state& reference, const spin_state& other) {
  detail::require_same_size(reference.size(), instance.n_sites(), "q_f");
  detail::require_same_size(other.size(), instance.n_sites(), "q_f");
  double numerator = 0.0;
  double denominator = 0.0;
  for (const auto& [key, j] : instance.couplers()) {
    const auto [i, k] = key;
    if (j * reference[i] * reference[k] < 0.0) {
      denominator += std::abs(j);
      if (other[i] == reference[i] && other[k] == reference[k]) numerator += std::abs(j);
    }
  }
  for (const auto& [i, h] : instance.biases()) {
    if (h * reference[i] < 0.0) {
      denominator += std::abs(h);
      if (other[i] == reference[i]) numerator += std::abs(h);
    }
  }
  if (denominator == 0.0) return 1.0;
  return numerator / denominator;
}

// Compressed neighbour lists for fast single-flip energy differences.
class adjacency {
 public:
  explicit adjacency(const spin_glass& instance)
      : offsets_(instance.n_sites() + 1, 0), bias_(instance.n_sites(), 0.0) {
    for (const auto& [key, j] : instance.couplers()) {
      if (j == 0.0) continue;
      ++offsets_[key.first + 1];
      ++offsets_[key.second + 1];
    }
    for (std::size_t i = 0; i < instance.n_sites(); ++i) offsets_[i + 1] += offsets_[i];
    neighbours_.resize(offsets_.back());
    weights_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [key, j] : instance.couplers()) {
      if (j == 0.0) continue;
      neighbours_[fill[key.first]] = key.second;
      weights_[fill[key.first]++] = j;
      neighbours_[fill[key.second]] = key.first;
      weights_[fill[key.second]++] = j;
    }
    for (const auto& [i, h] : instance.biases()) bias_[i] = h;
  }

  std::size_t n_sites() const noexcept { return bias_.size(); }

  // h_i + sum_j J_ij s_j
  template <class Spins>
  double local_field(const Spins& spins, std::size_t i) const {
    double f = bias_[i];
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
      f += weights_[k] * spins[neighbours_[k]];
    return f;
  }

  // Energy change from flipping site i.
  template <class Spins>
  double flip_delta(const Spins& spins, std::size_t i) const {
    return -2.0 * spins[i] * local_field(spins, i);
  }

  std::span<const std::size_t> neighbours(std::size_t i) const {
    return {neighbours_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> weights(std::size_t i) const {
    return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  double bias(std::size_t i) const { return bias_[i]; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> neighbours_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

struct local_minimum_check {
  bool strict = false;      // every single flip raises the energy
  bool degenerate = false;  // at least one flip leaves the energy unchanged

  explicit operator bool() const noexcept { return strict; }
};

inline local_minimum_check is_local_minimum(const spin_glass& instance, const spin_state& state) {
  detail::require_same_size(state.size(), instance.n_sites(), "is_local_minimum");
  const adjacency adj(instance);
  local_minimum_check out{true, false};
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double delta = adj.flip_delta(state, i);
    if (delta <= 0.0) out.strict = false;
    if (delta == 0.0) out.degenerate = true;
  }
  return out;
}

// Gauge transform h_i -> h_i r_i, J_ij -> J_ij r_i r_j. Self-inverse.
inline spin_glass spin_reversal_transform(const spin_glass& instance, const spin_state& gauge) {
  detail::require_same_size(gauge.size(), instance.n_sites(), "spin_reversal_transform");
  spin_glass::coupler_map couplers;
  spin_glass::bias_map biases;
  for (const auto& [key, j] : instance.couplers())
    couplers.emplace(key, j * gauge[key.first] * gauge[key.second]);
  for (const auto& [i, h] : instance.biases()) biases.emplace(i, h * gauge[i]);
  return spin_glass(instance.n_sites(), std::move(couplers), std::move(biases));
}

inline spin_state apply_gauge(const spin_state& state, const spin_state& gauge) {
  detail::require_same_size(state.size(), gauge.size(), "apply_gauge");
  spin_state out = state;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (gauge[i] < 0) out.flip(i);
  return out;
}

}  // namespace lda
