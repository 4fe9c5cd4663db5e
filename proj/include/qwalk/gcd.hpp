#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "qwalk/constants.hpp"
#include "qwalk/spinor.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

/// Global chirality distribution (P_L, P_R).
struct GcdPair {
  double left = 1.0;
  double right = 0.0;

  [[nodiscard]] double sum() const noexcept { return left + right; }
  friend bool operator==(const GcdPair&, const GcdPair&) = default;
};

/// Position-summed coherence Q = sum_k a_k conj(b_k).
struct Interference {
  std::complex<double> value;

  [[nodiscard]] double real() const noexcept { return value.real(); }
  [[nodiscard]] double imag() const noexcept { return value.imag(); }
};

inline GcdPair gcd_of_state(const SpinorField& state) noexcept {
  GcdPair g{0.0, 0.0};
  const auto a = state.upper();
  const auto b = state.lower();
  for (std::size_t i = 0; i < a.size(); ++i) {
    g.left += std::norm(a[i]);
    g.right += std::norm(b[i]);
  }
  return g;
}

inline Interference interference_of_state(const SpinorField& state) noexcept {
  std::complex<double> q{};
  const auto a = state.upper();
  const auto b = state.lower();
  for (std::size_t i = 0; i < a.size(); ++i) q += a[i] * std::conj(b[i]);
  return {q};
}

/// One step of the chirality master equation: the classical two-state
/// transition matrix [[cos^2, sin^2], [sin^2, cos^2]] plus the interference
/// correction Re(Q) sin(2 theta) (+1, -1).
inline GcdPair propagate_gcd(const GcdPair& gcd, const Interference& q, const CoinParams& coin) {
  const double c2 = coin.cos() * coin.cos();
  const double s2 = coin.sin() * coin.sin();
  const double drift = q.real() * 2.0 * coin.sin() * coin.cos();
  return {c2 * gcd.left + s2 * gcd.right + drift, s2 * gcd.left + c2 * gcd.right - drift};
}

/// Fixed point of propagate_gcd for a constant interference term.
inline GcdPair stationary_gcd(const Interference& q0, const CoinParams& coin) {
  const double tan_theta = std::tan(coin.theta());
  if (coin.theta() == 0.0 || tan_theta == 0.0) {
    throw std::invalid_argument("stationary distribution undefined for theta = 0");
  }
  const double shift = 2.0 * q0.real() / tan_theta;
  return {0.5 * (1.0 + shift), 0.5 * (1.0 - shift)};
}

/// Long-time interference for the Hadamard walk from a localized start.
/// The imaginary part carries the sign that matches Q = sum a conj(b) on the
/// state (cos alpha, e^{i beta} sin alpha).
inline Interference q0_hadamard(const BlochAngles& angles) {
  const double a2 = 2.0 * angles.alpha();
  const double beta = angles.beta();
  const double scale = 0.5 * hadamard_memory;
  return {{scale * (std::cos(a2) + std::sin(a2) * std::cos(beta)),
           -scale * std::sin(a2) * sqrt2 * std::sin(beta)}};
}

/// Long-time chirality distribution of the Hadamard walk.
inline GcdPair pi_hadamard(const BlochAngles& angles) {
  const double a2 = 2.0 * angles.alpha();
  const double shift = hadamard_memory * (std::cos(a2) + std::cos(angles.beta()) * std::sin(a2));
  return {0.5 * (1.0 + shift), 0.5 * (1.0 - shift)};
}

/// Mean of the final `fraction` of a series (at least one sample). Used as
/// the numerical t -> infinity estimate of an oscillating, converging series.
template <class T>
T tail_mean(std::span<const T> series, double fraction = 0.1) {
  if (series.empty()) throw std::invalid_argument("tail_mean of an empty series");
  const auto count = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(series.size()))), 1,
      series.size());
  T sum{};
  for (std::size_t i = series.size() - count; i < series.size(); ++i) sum += series[i];
  return sum / static_cast<double>(count);
}

/// Per-step chirality observables of a single walk, t = 0..steps.
struct GcdSeries {
  std::vector<GcdPair> gcd;
  std::vector<std::complex<double>> q;
};

/// Evolves `initial` unitarily for `steps` steps, recording GCD and Q.
inline GcdSeries unitary_series(SpinorField initial, const CoinParams& coin, std::size_t steps) {
  GcdSeries series;
  series.gcd.reserve(steps + 1);
  series.q.reserve(steps + 1);
  Walker walker(std::move(initial));
  series.gcd.push_back(gcd_of_state(walker.state()));
  series.q.push_back(interference_of_state(walker.state()).value);
  for (std::size_t t = 0; t < steps; ++t) {
    walker.step(coin);
    series.gcd.push_back(gcd_of_state(walker.state()));
    series.q.push_back(interference_of_state(walker.state()).value);
  }
  return series;
}

/// State after `steps` unitary steps.
inline SpinorField evolve_unitary(SpinorField initial, const CoinParams& coin, std::size_t steps) {
  Walker walker(std::move(initial));
  for (std::size_t t = 0; t < steps; ++t) walker.step(coin);
  return walker.state();
}

}  // namespace qwalk
