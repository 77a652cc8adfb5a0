#pragma once

// Small-N transverse-field Ising dynamics,
//   H(t) = sum J_ij s_i s_j + b(t) sum h_i s_i - Gamma(t) sum sigma^x_i,
// on a dense 2^N state vector (hbar = 1, dimensionless units). Basis index x
// carries a_i in bit i, i.e. bit set <=> s_i = +1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lda/errors.hpp"
#include "lda/sample_set.hpp"
#include "lda/samplers.hpp"
#include "lda/spin_model.hpp"

namespace lda {

inline constexpr std::size_t max_state_vector_sites = 16;
inline constexpr std::size_t max_dense_matrix_sites = 12;
inline constexpr double degenerate_gap_tolerance = 1e-10;

// Piecewise-linear control schedule over the time fraction t/T in [0, 1].
class schedule_table {
 public:
  schedule_table() = default;
  explicit schedule_table(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw parameter_error("schedule needs at least two points");
    if (points_.front().first != 0.0 || points_.back().first != 1.0)
      throw parameter_error("schedule must start at t/T = 0 and end at t/T = 1");
    for (std::size_t k = 1; k < points_.size(); ++k)
      if (!(points_[k].first > points_[k - 1].first))
        throw parameter_error("schedule times must be strictly increasing");
  }

  static schedule_table constant(double value) { return schedule_table({{0.0, value}, {1.0, value}}); }

  // Gamma falls linearly from gamma_start to zero.
  static schedule_table forward(double gamma_start) {
    return schedule_table({{0.0, gamma_start}, {1.0, 0.0}});
  }

  // Starts and ends classical (Gamma = 0), holding Gamma = gamma_pause on
  // [pause_start, pause_end].
  static schedule_table reverse(double gamma_pause, double pause_start, double pause_end) {
    return schedule_table({{0.0, 0.0}, {pause_start, gamma_pause}, {pause_end, gamma_pause}, {1.0, 0.0}});
  }

  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

  double value_at(double t) const {
    const std::size_t k = segment(t);
    const auto [t0, v0] = points_[k];
    const auto [t1, v1] = points_[k + 1];
    if (t <= t0) return v0;
    if (t >= t1) return v1;
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
  }

  // d value / d(t/T); the right-hand slope at breakpoints.
  double slope_at(double t) const {
    const std::size_t k = segment(t);
    const auto [t0, v0] = points_[k];
    const auto [t1, v1] = points_[k + 1];
    return (v1 - v0) / (t1 - t0);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& p : points_) m = std::max(m, std::abs(p.second));
    return m;
  }

 private:
  // Segment [k, k+1] containing t, right-continuous, last segment for t = 1.
  std::size_t segment(double t) const {
    std::size_t k = 0;
    while (k + 2 < points_.size() && t >= points_[k + 1].first) ++k;
    return k;
  }

  std::vector<std::pair<double, double>> points_;
};

struct qa_system {
  spin_glass instance;
  schedule_table gamma = schedule_table::forward(1.0);
  std::optional<schedule_table> hgain;  // absent = constant 1
  double total_time = 1.0;

  double gamma_at(double t) const { return gamma.value_at(t); }
  double hgain_at(double t) const { return hgain ? hgain->value_at(t) : 1.0; }
};

class wave_function {
 public:
  using amplitude = std::complex<double>;

  wave_function() = default;
  explicit wave_function(std::vector<amplitude> amplitudes) : amps_(std::move(amplitudes)) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < amps_.size()) ++n;
    if ((std::size_t{1} << n) != amps_.size()) throw dimension_error("amplitude count must be a power of two");
    n_sites_ = n;
  }

  // |+>^N
  static wave_function uniform(std::size_t n_sites) {
    const std::size_t dim = std::size_t{1} << n_sites;
    return wave_function(std::vector<amplitude>(dim, amplitude(1.0 / std::sqrt(double(dim)), 0.0)));
  }

  static wave_function basis(const spin_state& state) {
    std::vector<amplitude> a(std::size_t{1} << state.size(), 0.0);
    a[state.to_index()] = 1.0;
    return wave_function(std::move(a));
  }

  std::size_t n_sites() const noexcept { return n_sites_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  const std::vector<amplitude>& amplitudes() const noexcept { return amps_; }
  std::vector<amplitude>& amplitudes() noexcept { return amps_; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  double probability(std::size_t index) const { return std::norm(amps_[index]); }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t x = 0; x < amps_.size(); ++x) p[x] = std::norm(amps_[x]);
    return p;
  }

 private:
  std::size_t n_sites_ = 0;
  std::vector<amplitude> amps_;
};

inline double fidelity(const wave_function& a, const wave_function& b) {
  detail::require_same_size(a.dimension(), b.dimension(), "fidelity");
  std::complex<double> overlap = 0.0;
  for (std::size_t x = 0; x < a.dimension(); ++x) overlap += std::conj(a.amplitudes()[x]) * b.amplitudes()[x];
  return std::norm(overlap);
}

namespace detail {

inline void require_sites(std::size_t n, std::size_t limit, const char* what) {
  if (n > limit)
    throw capability_error(std::string(what) + " is limited to " + std::to_string(limit) + " sites, got " +
                           std::to_string(n));
}

// Classical energies of every basis state, split into coupler and bias parts
// so the h-gain can rescale the latter.
struct diagonal_terms {
  std::vector<double> couplers;
  std::vector<double> biases;
};

inline diagonal_terms diagonal(const spin_glass& instance) {
  const std::size_t n = instance.n_sites();
  const std::size_t dim = std::size_t{1} << n;
  diagonal_terms d{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  auto spin = [](std::size_t x, std::size_t i) { return ((x >> i) & 1u) ? 1.0 : -1.0; };
  for (std::size_t x = 0; x < dim; ++x) {
    double c = 0.0;
    double b = 0.0;
    for (const auto& [key, j] : instance.couplers()) c += j * spin(x, key.first) * spin(x, key.second);
    for (const auto& [i, h] : instance.biases()) b += h * spin(x, i);
    d.couplers[x] = c;
    d.biases[x] = b;
  }
  return d;
}

}  // namespace detail

// Dense real symmetric H(t) at time fraction t.
inline Eigen::MatrixXd hamiltonian_at(const qa_system& system, double t_fraction) {
  const std::size_t n = system.instance.n_sites();
  detail::require_sites(n, max_dense_matrix_sites, "dense Hamiltonian");
  if (!(t_fraction >= 0.0 && t_fraction <= 1.0)) throw parameter_error("time fraction must lie in [0, 1]");
  const std::size_t dim = std::size_t{1} << n;
  const auto diag = detail::diagonal(system.instance);
  const double gamma = system.gamma_at(t_fraction);
  const double gain = system.hgain_at(t_fraction);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t x = 0; x < dim; ++x) {
    h(x, x) = diag.couplers[x] + gain * diag.biases[x];
    for (std::size_t i = 0; i < n; ++i) h(x, x ^ (std::size_t{1} << i)) = -gamma;
  }
  return h;
}

struct spectrum {
  std::vector<double> energies;  // ascending
  Eigen::MatrixXd vectors;       // column k belongs to energies[k]
};

namespace detail {

inline spectrum diagonalize(const Eigen::MatrixXd& h, std::size_t k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  spectrum out;
  out.vectors = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) {
    out.energies.push_back(solver.eigenvalues()(static_cast<Eigen::Index>(c)));
    auto col = out.vectors.col(static_cast<Eigen::Index>(c));
    Eigen::Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col(arg) < 0.0) col = -col;
  }
  return out;
}

}  // namespace detail

// The k lowest eigenpairs; each eigenvector has its largest-magnitude
// component positive.
inline spectrum instantaneous_spectrum(const qa_system& system, double t_fraction, std::size_t k) {
  const Eigen::MatrixXd h = hamiltonian_at(system, t_fraction);
  if (k == 0 || k > static_cast<std::size_t>(h.rows())) throw parameter_error("requested level count out of range");
  return detail::diagonalize(h, k);
}

// |<m| dH/dt |GS>| / (E_m - E_GS)^2 with t in absolute time units, so schedule
// slopes are divided by the total time.
inline double adiabatic_ratio(const qa_system& system, double t_fraction, std::size_t level) {
  if (level == 0) throw parameter_error("adiabatic ratio needs an excited level (m >= 1)");
  const std::size_t n = system.instance.n_sites();
  const spectrum spec = instantaneous_spectrum(system, t_fraction, level + 1);
  const double gap = spec.energies[level] - spec.energies[0];
  if (std::abs(gap) <= degenerate_gap_tolerance)
    throw degenerate_gap_error("gap between level " + std::to_string(level) + " and the ground state vanishes");

  const double gamma_rate = system.gamma.slope_at(t_fraction) / system.total_time;
  const double gain_rate = system.hgain ? system.hgain->slope_at(t_fraction) / system.total_time : 0.0;
  const auto diag = detail::diagonal(system.instance);
  const auto ground = spec.vectors.col(0);
  const auto excited = spec.vectors.col(static_cast<Eigen::Index>(level));
  double element = 0.0;
  for (std::size_t x = 0; x < diag.biases.size(); ++x) {
    double applied = gain_rate * diag.biases[x] * ground(x);
    for (std::size_t i = 0; i < n; ++i) applied -= gamma_rate * ground(x ^ (std::size_t{1} << i));
    element += excited(x) * applied;
  }
  return std::abs(element) / (gap * gap);
}

// Steps for evolve() when the caller has no preference: keeps dt * ||H|| near
// 0.05, with at least 200 steps.
inline std::size_t default_steps(const qa_system& system) {
  const double n = static_cast<double>(system.instance.n_sites());
  double scale = 0.0;
  for (const auto& [k, j] : system.instance.couplers()) scale += std::abs(j);
  double hgain_max = system.hgain ? system.hgain->max_abs() : 1.0;
  for (const auto& [i, h] : system.instance.biases()) scale += hgain_max * std::abs(h);
  scale += n * system.gamma.max_abs();
  const double steps = std::ceil(system.total_time * std::max(scale, 1.0) / 0.05);
  return static_cast<std::size_t>(std::max(200.0, steps));
}

namespace detail {

// One symmetric split step over [t, t + dt] (dt may be negative): half
// diagonal phase, exact transverse-field rotation, half diagonal phase, all
// evaluated at the step midpoint.
inline void strang_step(const qa_system& system, const diagonal_terms& diag, std::vector<std::complex<double>>& psi,
                        double t, double dt) {
  const std::size_t n = system.instance.n_sites();
  const double mid = std::clamp((t + 0.5 * dt) / system.total_time, 0.0, 1.0);
  const double gamma = system.gamma_at(mid);
  const double gain = system.hgain_at(mid);
  const std::size_t dim = psi.size();

  auto half_diagonal = [&] {
    for (std::size_t x = 0; x < dim; ++x) {
      const double phase = -0.5 * dt * (diag.couplers[x] + gain * diag.biases[x]);
      psi[x] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
  };

  half_diagonal();
  // exp(-i dt (-gamma sigma^x)) = cos(theta) + i sin(theta) sigma^x
  const double theta = dt * gamma;
  const double c = std::cos(theta);
  const std::complex<double> is(0.0, std::sin(theta));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t x = 0; x < dim; ++x) {
      if (x & bit) continue;
      const auto a0 = psi[x];
      const auto a1 = psi[x | bit];
      psi[x] = c * a0 + is * a1;
      psi[x | bit] = is * a0 + c * a1;
    }
  }
  half_diagonal();
}

}  // namespace detail

// Integrates i d psi/dt = H(t) psi over [0, T] with `steps` fourth-order
// steps (triple-jump composition of the symmetric split step). Every
// sub-step is unitary, so the norm is conserved up to rounding.
inline wave_function evolve(const qa_system& system, const wave_function& initial, std::size_t steps = 0) {
  const std::size_t n = system.instance.n_sites();
  detail::require_sites(n, max_state_vector_sites, "state-vector evolution");
  detail::require_same_size(initial.n_sites(), n, "evolve initial state");
  if (std::abs(initial.norm_squared() - 1.0) > 1e-9) throw parameter_error("initial wave function is not normalized");
  if (!(system.total_time >= 0.0)) throw parameter_error("total time must be non-negative");
  if (steps == 0) steps = default_steps(system);

  const auto diag = detail::diagonal(system.instance);
  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2);
  const double w0 = -cbrt2 / (2.0 - cbrt2);
  const double dt = system.total_time / static_cast<double>(steps);

  wave_function out = initial;
  auto& psi = out.amplitudes();
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = dt * static_cast<double>(k);
    detail::strang_step(system, diag, psi, t, w1 * dt);
    detail::strang_step(system, diag, psi, t + w1 * dt, w0 * dt);
    detail::strang_step(system, diag, psi, t + (w1 + w0) * dt, w1 * dt);
  }
  return out;
}

// Born-rule sampling of `shots` basis states, energies evaluated under
// `instance`.
inline sample_set measure(const spin_glass& instance, const wave_function& state, std::size_t shots,
                          std::uint64_t seed) {
  detail::require_same_size(state.n_sites(), instance.n_sites(), "measure");
  if (std::abs(state.norm_squared() - 1.0) > 1e-6) throw parameter_error("wave function is not normalized");
  const auto probs = state.probabilities();
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t x = 0; x < probs.size(); ++x) cumulative[x] = (acc += probs[x]);

  std::mt19937_64 rng(derive_seed(seed, 0));
  sample_set out;
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t x = static_cast<std::size_t>(it - cumulative.begin());
    if (x >= probs.size()) x = probs.size() - 1;
    while (probs[x] == 0.0 && x > 0) --x;  // never report a zero-probability state
    spin_state st = spin_state::from_index(x, instance.n_sites());
    const double e = energy(instance, st);
    out.push_back(std::move(st), e);
  }
  out.sort();
  return out;
}

// Forward anneal from |+>^N followed by measurement. Gamma starts at
// gamma_scale * max|J, h| of the sampled instance and falls linearly to 0.
struct qa_sampler {
  double gamma_scale = 5.0;
  double total_time = 10.0;
  std::size_t steps = 0;  // 0 = default_steps
  std::uint64_t seed = 0;
  std::uint64_t calls = 0;

  sample_set operator()(const spin_glass& instance, std::size_t n_samples) {
    const double scale = std::max(instance.max_abs_strength(), 1e-12);
    qa_system system{instance, schedule_table::forward(gamma_scale * scale), std::nullopt, total_time};
    const wave_function final_state = evolve(system, wave_function::uniform(instance.n_sites()), steps);
    sample_set out = measure(instance, final_state, n_samples, derive_seed(seed, 0xa11ceULL + calls++));
    out.budget = n_samples;
    return out;
  }
};

}  // namespace lda
