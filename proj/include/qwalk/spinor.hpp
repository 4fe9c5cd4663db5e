#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/constants.hpp"
#include "qwalk/format.hpp"

namespace qwalk {

using Amplitude = std::complex<double>;

enum class Chirality { left, right };

inline const char* to_string(Chirality c) { return c == Chirality::left ? "L" : "R"; }

/// Coin bias angle theta in [0, pi/2]; pi/4 is the Hadamard coin.
class CoinParams {
 public:
  explicit CoinParams(double theta) : theta_(theta) {
    if (!(theta >= 0.0 && theta <= pi / 2.0 + tol::angle_slack)) {
      throw std::invalid_argument("coin angle theta must lie in [0, pi/2]");
    }
    cos_ = std::cos(theta);
    sin_ = std::sin(theta);
  }

  static CoinParams hadamard() { return CoinParams(hadamard_theta); }

  [[nodiscard]] double theta() const noexcept { return theta_; }
  [[nodiscard]] double cos() const noexcept { return cos_; }
  [[nodiscard]] double sin() const noexcept { return sin_; }

 private:
  double theta_;
  double cos_;
  double sin_;
};

/// Initial-condition angles on the Bloch sphere: alpha in [0, pi],
/// beta in [0, 2 pi].
class BlochAngles {
 public:
  BlochAngles(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha >= 0.0 && alpha <= pi + tol::angle_slack)) {
      throw std::invalid_argument("alpha must lie in [0, pi]");
    }
    if (!(beta >= 0.0 && beta <= 2.0 * pi + tol::angle_slack)) {
      throw std::invalid_argument("beta must lie in [0, 2 pi]");
    }
  }

  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }

  /// (cos alpha, e^{i beta} sin alpha)
  [[nodiscard]] Amplitude upper() const { return {std::cos(alpha_), 0.0}; }
  [[nodiscard]] Amplitude lower() const { return std::polar(std::sin(alpha_), beta_); }

  friend bool operator==(const BlochAngles&, const BlochAngles&) = default;

 private:
  double alpha_;
  double beta_;
};

/// Walker wavefunction on the line: site k -> (a_k, b_k), a the left
/// chirality component and b the right one.
///
/// Storage is a dense window [lo, hi]; sites outside it are zero. Steps grow
/// the window by one site on each side.
class SpinorField {
 public:
  SpinorField() : a_(1), b_(1) {}

  /// Single occupied site at the origin.
  static SpinorField localized(Amplitude a0, Amplitude b0) {
    SpinorField field;
    field.a_[0] = a0;
    field.b_[0] = b0;
    return field;
  }

  /// Window [lo, lo + width) of zeros at time t.
  static SpinorField zeros(long lo, std::size_t width, std::uint64_t time = 0) {
    if (width == 0) throw std::invalid_argument("spinor window must be non-empty");
    SpinorField field;
    field.lo_ = lo;
    field.a_.assign(width, Amplitude{});
    field.b_.assign(width, Amplitude{});
    field.time_ = time;
    return field;
  }

  [[nodiscard]] long lo() const noexcept { return lo_; }
  [[nodiscard]] long hi() const noexcept { return lo_ + static_cast<long>(a_.size()) - 1; }
  [[nodiscard]] std::size_t width() const noexcept { return a_.size(); }
  [[nodiscard]] std::uint64_t time() const noexcept { return time_; }
  void set_time(std::uint64_t t) noexcept { time_ = t; }

  [[nodiscard]] bool in_window(long k) const noexcept { return k >= lo_ && k <= hi(); }

  [[nodiscard]] Amplitude a(long k) const noexcept {
    return in_window(k) ? a_[static_cast<std::size_t>(k - lo_)] : Amplitude{};
  }
  [[nodiscard]] Amplitude b(long k) const noexcept {
    return in_window(k) ? b_[static_cast<std::size_t>(k - lo_)] : Amplitude{};
  }

  /// Writes both components at site k, growing the window if needed.
  void set(long k, Amplitude a, Amplitude b) {
    grow_to_include(k);
    a_[static_cast<std::size_t>(k - lo_)] = a;
    b_[static_cast<std::size_t>(k - lo_)] = b;
  }

  [[nodiscard]] std::span<const Amplitude> upper() const noexcept { return a_; }
  [[nodiscard]] std::span<const Amplitude> lower() const noexcept { return b_; }
  [[nodiscard]] std::span<Amplitude> upper() noexcept { return a_; }
  [[nodiscard]] std::span<Amplitude> lower() noexcept { return b_; }

  /// Re-shapes to the window [lo, lo + width) at time t; contents unspecified.
  void reshape(long lo, std::size_t width, std::uint64_t time) {
    lo_ = lo;
    a_.resize(width);
    b_.resize(width);
    time_ = time;
  }

  [[nodiscard]] double norm() const noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) sum += std::norm(a_[i]) + std::norm(b_[i]);
    return sum;
  }

  /// Smallest [first, last] holding every non-zero amplitude; empty field
  /// reports {lo, lo - 1}.
  [[nodiscard]] std::pair<long, long> support() const noexcept {
    long first = hi() + 1;
    long last = lo_ - 1;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (a_[i] != Amplitude{} || b_[i] != Amplitude{}) {
        const long k = lo_ + static_cast<long>(i);
        first = std::min(first, k);
        last = std::max(last, k);
      }
    }
    if (last < first) return {lo_, lo_ - 1};
    return {first, last};
  }

 private:
  void grow_to_include(long k) {
    if (k < lo_) {
      const auto extra = static_cast<std::size_t>(lo_ - k);
      a_.insert(a_.begin(), extra, Amplitude{});
      b_.insert(b_.begin(), extra, Amplitude{});
      lo_ = k;
    } else if (k > hi()) {
      const auto size = static_cast<std::size_t>(k - lo_ + 1);
      a_.resize(size);
      b_.resize(size);
    }
  }

  long lo_ = 0;
  std::vector<Amplitude> a_;
  std::vector<Amplitude> b_;
  std::uint64_t time_ = 0;
};

/// Localized start |Psi(0)> = (cos alpha, e^{i beta} sin alpha) |0>.
inline SpinorField init_state(const BlochAngles& angles) {
  return SpinorField::localized(angles.upper(), angles.lower());
}

inline SpinorField basis_state(Chirality c) {
  return c == Chirality::left ? SpinorField::localized(1.0, 0.0)
                              : SpinorField::localized(0.0, 1.0);
}

/// Position probabilities |a_k|^2 + |b_k|^2 over the field's window.
struct PositionDistribution {
  long lo = 0;
  std::vector<double> probability;

  [[nodiscard]] double at(long k) const noexcept {
    const long i = k - lo;
    if (i < 0 || i >= static_cast<long>(probability.size())) return 0.0;
    return probability[static_cast<std::size_t>(i)];
  }
};

inline PositionDistribution position_distribution(const SpinorField& state) {
  PositionDistribution dist{state.lo(), std::vector<double>(state.width())};
  const auto a = state.upper();
  const auto b = state.lower();
  for (std::size_t i = 0; i < a.size(); ++i) dist.probability[i] = std::norm(a[i]) + std::norm(b[i]);
  return dist;
}

/// Debug dump: one row per site in the window.
inline void write_csv(std::ostream& os, const SpinorField& state) {
  os << "site,re_a,im_a,re_b,im_b\n";
  for (long k = state.lo(); k <= state.hi(); ++k) {
    const Amplitude a = state.a(k);
    const Amplitude b = state.b(k);
    os << k << ',' << fmt17(a.real()) << ',' << fmt17(a.imag()) << ',' << fmt17(b.real()) << ','
       << fmt17(b.imag()) << '\n';
  }
}

inline nlohmann::json to_json(const SpinorField& state) {
  nlohmann::json sites = nlohmann::json::array();
  for (long k = state.lo(); k <= state.hi(); ++k) {
    const Amplitude a = state.a(k);
    const Amplitude b = state.b(k);
    sites.push_back({{"site", k},
                     {"re_a", a.real()},
                     {"im_a", a.imag()},
                     {"re_b", b.real()},
                     {"im_b", b.imag()}});
  }
  return {{"time", state.time()}, {"sites", std::move(sites)}};
}

}  // namespace qwalk
