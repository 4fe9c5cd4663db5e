#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "qwalk/format.hpp"
#include "qwalk/gcd.hpp"
#include "qwalk/links.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/random.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

/// Probabilities of the four site neighbourhoods when each link breaks
/// independently with probability r.
struct LinkWeights {
  double intact;        // (1 - r)^2
  double left_broken;   // r (1 - r)
  double right_broken;  // r (1 - r)
  double isolated;      // r^2

  [[nodiscard]] double sum() const noexcept { return intact + left_broken + right_broken + isolated; }
};

inline LinkWeights link_weights(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("break probability r must lie in [0, 1]");
  const double keep = 1.0 - r;
  return {keep * keep, r * keep, r * keep, r * r};
}

/// Chirality density matrix after tracing out position:
/// [[P_L, Q], [conj(Q), P_R]].
struct ReducedDensity {
  std::complex<double> ll, lr, rl, rr;

  [[nodiscard]] std::complex<double> trace() const noexcept { return ll + rr; }

  [[nodiscard]] bool hermitian(double eps) const noexcept {
    return std::abs(ll.imag()) <= eps && std::abs(rr.imag()) <= eps &&
           std::abs(lr - std::conj(rl)) <= eps;
  }

  /// Eigenvalues of the Hermitian part, ascending.
  [[nodiscard]] std::pair<double, double> eigenvalues() const noexcept {
    const double mean = 0.5 * (ll.real() + rr.real());
    const double half_gap = 0.5 * (ll.real() - rr.real());
    const double radius = std::sqrt(half_gap * half_gap + std::norm(0.5 * (lr + std::conj(rl))));
    return {mean - radius, mean + radius};
  }
};

inline ReducedDensity reduced_density(const SpinorField& state) noexcept {
  const GcdPair g = gcd_of_state(state);
  const std::complex<double> q = interference_of_state(state).value;
  return {g.left, q, std::conj(q), g.right};
}

/// One step of the averaged broken-link master equation: the classical
/// coin matrix with no interference term and no dependence on r.
inline GcdPair averaged_master_step(const GcdPair& gcd, const CoinParams& coin) noexcept {
  const double c2 = coin.cos() * coin.cos();
  const double s2 = coin.sin() * coin.sin();
  return {c2 * gcd.left + s2 * gcd.right, s2 * gcd.left + c2 * gcd.right};
}

struct EnsembleConfig {
  double r = 0.3;
  CoinParams coin = CoinParams::hadamard();
  BlochAngles angles{pi / 4.0, 0.0};
  std::size_t steps = 2000;
  std::size_t trajectories = 100;
  LinkRegion region = LinkRegion::full_line;
  std::uint64_t master_seed = 1;
  long half_line_boundary = default_half_line_boundary;
  double tail_fraction = 0.1;
  unsigned workers = 0;

  void validate() const {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("break probability r must lie in [0, 1]");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (trajectories < 1) throw std::invalid_argument("trajectories must be >= 1");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
      throw std::invalid_argument("tail fraction must lie in (0, 1]");
    }
  }
};

/// Ensemble-averaged observables, t = 0..steps, plus tail-mean estimates.
struct EnsembleResult {
  std::vector<GcdPair> gcd;
  std::vector<std::complex<double>> q;
  double pi_left = 0.0;
  std::complex<double> q0;
  /// Standard error of pi_left across trajectories.
  double pi_left_stderr = 0.0;
};

/// Called after every step of a trajectory with the step's mask and the
/// new state. Used by tests to check per-step invariants.
using TrajectoryObserver =
    std::function<void(std::size_t t, const LinkMask& mask, const SpinorField& state)>;

struct TrajectorySeries {
  std::vector<double> p_left;
  std::vector<std::complex<double>> q;
};

/// One broken-link trajectory. Every step samples a fresh mask over the
/// links touching the current window.
inline TrajectorySeries run_trajectory(const EnsembleConfig& config, std::size_t index,
                                       const TrajectoryObserver& observer = {}) {
  Philox4x64 rng = Philox4x64(config.master_seed).split(index);
  const std::uint64_t threshold = Philox4x64::bernoulli_threshold(config.r);
  TrajectorySeries series;
  series.p_left.reserve(config.steps + 1);
  series.q.reserve(config.steps + 1);
  Walker walker(init_state(config.angles));
  LinkMask mask(config.region, config.half_line_boundary);
  auto record = [&] {
    series.p_left.push_back(gcd_of_state(walker.state()).left);
    series.q.push_back(interference_of_state(walker.state()).value);
  };
  record();
  for (std::size_t t = 1; t <= config.steps; ++t) {
    const SpinorField& s = walker.state();
    mask.resample(rng, threshold, links_touching(s.lo(), s.hi()));
    walker.step(config.coin, mask);
    record();
    if (observer) observer(t, mask, walker.state());
  }
  return series;
}

inline EnsembleResult run_ensemble(const EnsembleConfig& config) {
  config.validate();
  const std::size_t n = config.trajectories;
  std::vector<TrajectorySeries> runs(n);
  parallel_for(n, config.workers, [&](std::size_t i) { runs[i] = run_trajectory(config, i); });

  EnsembleResult result;
  const std::size_t len = config.steps + 1;
  result.gcd.resize(len);
  result.q.resize(len);
  std::vector<double> column(n);
  std::vector<std::complex<double>> qcolumn(n);
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = runs[i].p_left[t];
      qcolumn[i] = runs[i].q[t];
    }
    const double pl = pairwise_sum<double>(column) / static_cast<double>(n);
    result.gcd[t] = {pl, 1.0 - pl};
    result.q[t] = pairwise_sum<std::complex<double>>(qcolumn) / static_cast<double>(n);
  }

  std::vector<double> left(len);
  for (std::size_t t = 0; t < len; ++t) left[t] = result.gcd[t].left;
  result.pi_left = tail_mean<double>(left, config.tail_fraction);
  result.q0 = tail_mean<std::complex<double>>(result.q, config.tail_fraction);

  if (n > 1) {
    std::vector<double> per_run(n);
    for (std::size_t i = 0; i < n; ++i) per_run[i] = tail_mean<double>(runs[i].p_left, config.tail_fraction);
    const double mean = pairwise_sum<double>(per_run) / static_cast<double>(n);
    double ss = 0.0;
    for (double x : per_run) ss += (x - mean) * (x - mean);
    result.pi_left_stderr = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  return result;
}

struct SweepRow {
  double r;
  double pi_left;
  double re_q0;
  double stderr_pi_left;
};

/// Half-line ensembles over a grid of break probabilities. `base` supplies
/// everything but r and the region.
inline std::vector<SweepRow> halfline_r_sweep(const std::vector<double>& rs, EnsembleConfig base) {
  std::vector<SweepRow> rows;
  rows.reserve(rs.size());
  base.region = LinkRegion::right_half_line;
  for (double r : rs) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("sweep values of r must lie in (0, 1]");
    base.r = r;
    const EnsembleResult res = run_ensemble(base);
    rows.push_back({r, res.pi_left, res.q0.real(), res.pi_left_stderr});
  }
  return rows;
}

/// CSV: t,P_L,P_R,ReQ,ImQ
inline void write_time_series_csv(std::ostream& os, const EnsembleResult& res) {
  os << "t,P_L,P_R,ReQ,ImQ\n";
  for (std::size_t t = 0; t < res.gcd.size(); ++t) {
    os << t << ',' << fmt17(res.gcd[t].left) << ',' << fmt17(res.gcd[t].right) << ','
       << fmt17(res.q[t].real()) << ',' << fmt17(res.q[t].imag()) << '\n';
  }
}

/// CSV: r,Pi_L,ReQ0,stderr
inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "r,Pi_L,ReQ0,stderr\n";
  for (const auto& row : rows) {
    os << fmt17(row.r) << ',' << fmt17(row.pi_left) << ',' << fmt17(row.re_q0) << ','
       << fmt17(row.stderr_pi_left) << '\n';
  }
}

}  // namespace qwalk
