#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/ensemble.hpp"
#include "qwalk/games.hpp"
#include "qwalk/gcd.hpp"
#include "qwalk/measurement.hpp"
#include "qwalk/random.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

struct VerifyCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyCheck> checks;

  [[nodiscard]] bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }

  void add(std::string name, bool ok, const std::string& detail) {
    checks.push_back({std::move(name), ok, detail});
  }
};

inline nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"suite", report.suite}, {"passed", report.passed()}, {"checks", checks}};
}

namespace detail {

inline std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

/// Random (alpha, beta, theta) with theta kept away from 0.
inline std::tuple<BlochAngles, CoinParams> random_setup(Philox4x64& rng) {
  const BlochAngles angles(pi * rng.uniform(), 2.0 * pi * rng.uniform());
  const CoinParams coin(0.05 + (pi / 2.0 - 0.05) * rng.uniform());
  return {angles, coin};
}

}  // namespace detail

/// Wavefunction GCD against the chirality master equation, step by step.
inline VerifyReport verify_master_equation(std::size_t cases = 20, std::size_t steps = 500,
                                           std::uint64_t seed = 2024) {
  VerifyReport report{"master-equation", {}};
  Philox4x64 rng(seed);
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const auto [angles, coin] = detail::random_setup(rng);
    const GcdSeries series = unitary_series(init_state(angles), coin, steps);
    for (std::size_t t = 0; t < steps; ++t) {
      const GcdPair predicted = propagate_gcd(series.gcd[t], {series.q[t]}, coin);
      worst = std::max({worst, std::abs(predicted.left - series.gcd[t + 1].left),
                        std::abs(predicted.right - series.gcd[t + 1].right)});
    }
  }
  report.add("max |wavefunction - master equation|", worst < tol::exact, detail::sci(worst));
  return report;
}

/// Closed-form chain against repeated matrix products.
inline VerifyReport verify_markov_closed_form(int max_m = 50) {
  VerifyReport report{"markov-closed-form", {}};
  const MarkovMatrix chain = markov_matrix_hadamard();
  double worst = 0.0;
  for (const GcdPair start : {GcdPair{1.0, 0.0}, GcdPair{0.0, 1.0}, GcdPair{0.3, 0.7},
                              pi_hadamard({pi / 4.0, 0.0}), pi_hadamard({1.0, 2.0})}) {
    GcdPair power = start;
    for (int m = 1; m <= max_m; ++m) {
      const GcdPair closed = chain_distribution(m, start);
      worst = std::max({worst, std::abs(closed.left - power.left), std::abs(closed.right - power.right)});
      power = chain.apply(power);
    }
  }
  report.add("closed form vs matrix power, m <= " + std::to_string(max_m), worst < tol::exact,
             detail::sci(worst));
  const GcdPair far = chain_distribution(64, {1.0, 0.0});
  const double gap = std::max(std::abs(far.left - 0.5), std::abs(far.right - 0.5));
  report.add("m = 64 within 1e-12 of (1/2, 1/2)", gap < tol::exact, detail::sci(gap));
  report.add("p + q = 1", std::abs(chain.p + chain.q - 1.0) < tol::exact,
             detail::sci(std::abs(chain.p + chain.q - 1.0)));
  return report;
}

/// Norm, reduced-density and link-weight invariants under random masks.
inline VerifyReport verify_channel_invariants(std::size_t trajectories = 20, std::size_t steps = 500,
                                              std::uint64_t seed = 7) {
  VerifyReport report{"channel-invariants", {}};
  Philox4x64 rng(seed);
  double norm_err = 0.0, trace_err = 0.0, herm_err = 0.0, min_eig = 1.0, max_eig = 0.0;
  for (std::size_t i = 0; i < trajectories; ++i) {
    auto [angles, coin] = detail::random_setup(rng);
    EnsembleConfig cfg;
    cfg.r = rng.uniform();
    cfg.coin = coin;
    cfg.angles = angles;
    cfg.steps = steps;
    cfg.region = i % 2 == 0 ? LinkRegion::full_line : LinkRegion::right_half_line;
    cfg.master_seed = seed + i;
    run_trajectory(cfg, 0, [&](std::size_t, const LinkMask&, const SpinorField& s) {
      const ReducedDensity rho = reduced_density(s);
      norm_err = std::max(norm_err, std::abs(s.norm() - 1.0));
      trace_err = std::max(trace_err, std::abs(rho.trace() - 1.0));
      herm_err = std::max(herm_err, std::abs(rho.lr - std::conj(rho.rl)));
      const auto [lo, hi] = rho.eigenvalues();
      min_eig = std::min(min_eig, lo);
      max_eig = std::max(max_eig, hi);
    });
  }
  report.add("norm conserved", norm_err < tol::norm, detail::sci(norm_err));
  report.add("unit trace", trace_err < tol::exact, detail::sci(trace_err));
  report.add("hermitian", herm_err < tol::exact, detail::sci(herm_err));
  report.add("positive semidefinite", min_eig > -tol::psd && max_eig < 1.0 + tol::psd,
             "eigenvalues in [" + detail::sci(min_eig) + ", " + detail::sci(max_eig) + "]");
  double weight_err = 0.0;
  for (int k = 0; k < 1000; ++k) weight_err = std::max(weight_err, std::abs(link_weights(rng.uniform()).sum() - 1.0));
  report.add("link weights sum to 1", weight_err <= tol::weights, detail::sci(weight_err));
  return report;
}

/// Quadrature fairness of the coin-flipping games.
inline VerifyReport verify_game_fairness(std::size_t resolution = 129) {
  VerifyReport report{"game-fairness", {}};
  for (int m : {1, 2, 3, 5}) {
    const PayoffSummary s = winning_probability(m, resolution);
    const double err = std::abs(s.pi_a - 0.5);
    report.add("pi_A = 1/2, m = " + std::to_string(m), err < 1e-10, detail::sci(err));
    report.add("payoffs $0, m = " + std::to_string(m),
               std::abs(s.payoff_a) < 1e-10 && std::abs(s.payoff_b) < 1e-10,
               detail::sci(std::abs(s.payoff_a)));
  }
  return report;
}

inline const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {"master-equation", "markov-closed-form",
                                                 "channel-invariants", "game-fairness"};
  return names;
}

inline VerifyReport run_verify_suite(const std::string& name) {
  if (name == "master-equation") return verify_master_equation();
  if (name == "markov-closed-form") return verify_markov_closed_form();
  if (name == "channel-invariants") return verify_channel_invariants();
  if (name == "game-fairness") return verify_game_fairness();
  throw std::invalid_argument("unknown verification suite '" + name + "'");
}

}  // namespace qwalk
