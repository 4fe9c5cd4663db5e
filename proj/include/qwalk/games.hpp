#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/constants.hpp"
#include "qwalk/gcd.hpp"
#include "qwalk/measurement.hpp"
#include "qwalk/random.hpp"

namespace qwalk {

enum class Player { alice, bob };
enum class AngleRole { alpha, beta };
enum class Engine { closed_form, full_simulation };

inline const char* to_string(Player p) { return p == Player::alice ? "alice" : "bob"; }
inline const char* to_string(AngleRole a) { return a == AngleRole::alpha ? "alpha" : "beta"; }
inline const char* to_string(Engine e) {
  return e == Engine::closed_form ? "closed-form" : "full-simulation";
}

inline Player other(Player p) { return p == Player::alice ? Player::bob : Player::alice; }

/// Both players' choices combined into one initial condition. Alice sets
/// `alice_picks`, Bob the other angle.
struct Strategy {
  BlochAngles angles{0.0, 0.0};
  AngleRole alice_picks = AngleRole::alpha;
};

struct GameRules {
  int measurements = 1;
  long stake = 1;
  std::size_t epoch_steps = 2000;
  AngleRole alice_picks = AngleRole::alpha;

  void validate() const {
    if (measurements < 1) throw std::invalid_argument("measurements m must be >= 1");
    if (stake < 1) throw std::invalid_argument("stake must be >= 1");
    if (epoch_steps < 1) throw std::invalid_argument("epoch length T must be >= 1");
  }

  [[nodiscard]] AngleRole role_of(Player p) const noexcept {
    if (p == Player::alice) return alice_picks;
    return alice_picks == AngleRole::alpha ? AngleRole::beta : AngleRole::alpha;
  }
};

/// Win densities: Alice wins on |L>, Bob on |R>.
struct WinDensity {
  double alice;
  double bob;
};

struct PayoffSummary {
  double pi_a;
  double pi_b;
  double payoff_a;
  double payoff_b;
};

/// Probability that the m-th measurement reads L (Alice) or R (Bob) when
/// the game starts from `angles` and every epoch is asymptotically long.
inline WinDensity win_density(const BlochAngles& angles, int m) {
  const GcdPair g = chain_distribution(m, pi_hadamard(angles));
  return {g.left, g.right};
}

/// Composite Simpson rule over [a0, a1] x [b0, b1] with `points` nodes per
/// axis (bumped to the next odd count so the interval count is even).
template <class F>
double simpson_2d(F&& f, double a0, double a1, double b0, double b1, std::size_t points) {
  if (points < 3) throw std::invalid_argument("Simpson rule needs at least 3 points per axis");
  if (points % 2 == 0) ++points;
  const std::size_t intervals = points - 1;
  const double ha = (a1 - a0) / static_cast<double>(intervals);
  const double hb = (b1 - b0) / static_cast<double>(intervals);
  auto weight = [intervals](std::size_t i) {
    if (i == 0 || i == intervals) return 1.0;
    return i % 2 == 1 ? 4.0 : 2.0;
  };
  double total = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double a = a0 + ha * static_cast<double>(i);
    double row = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
      row += weight(j) * f(a, b0 + hb * static_cast<double>(j));
    }
    total += weight(i) * row;
  }
  return total * ha * hb / 9.0;
}

/// Mean of sigma_A over the whole strategy space alpha in [0, pi],
/// beta in [0, 2 pi] (players choosing uniformly at random).
template <class Density>
double mean_over_strategies(Density&& sigma, std::size_t resolution) {
  const double area = 2.0 * pi * pi;
  return simpson_2d(sigma, 0.0, pi, 0.0, 2.0 * pi, resolution) / area;
}

inline PayoffSummary winning_probability(int m, std::size_t resolution = 129, long stake = 1) {
  if (m < 1) throw std::invalid_argument("measurements m must be >= 1");
  if (resolution < 64) throw std::invalid_argument("quadrature resolution must be >= 64 points");
  const double pi_a = mean_over_strategies(
      [m](double alpha, double beta) {
        return win_density(BlochAngles(std::min(alpha, pi), std::min(beta, 2.0 * pi)), m).alice;
      },
      resolution);
  const double pi_b = 1.0 - pi_a;
  const double s = static_cast<double>(stake);
  return {pi_a, pi_b, s * (pi_a - pi_b), s * (pi_b - pi_a)};
}

/// Result of one round. `delta_alice` is in stake units; Bob's is its negation.
struct RoundOutcome {
  Chirality outcome;
  Player winner;
  long delta_alice;
};

/// Plays rounds with either engine. The full-simulation engine keeps a
/// ProtocolSimulator, so the wavefunction for each start state is evolved
/// once per engine.
class RoundEngine {
 public:
  RoundEngine(Engine engine, const GameRules& rules, CoinParams coin = CoinParams::hadamard())
      : engine_(engine), rules_(rules) {
    rules_.validate();
    if (engine == Engine::full_simulation) {
      simulator_ = std::make_shared<ProtocolSimulator>(coin, rules.epoch_steps);
    }
  }

  [[nodiscard]] Engine engine() const noexcept { return engine_; }
  [[nodiscard]] const GameRules& rules() const noexcept { return rules_; }

  RoundOutcome play(const BlochAngles& angles, Philox4x64& rng) const {
    Chirality outcome;
    if (engine_ == Engine::closed_form) {
      const double p_left = win_density(angles, rules_.measurements).alice;
      outcome = rng.uniform() < p_left ? Chirality::left : Chirality::right;
    } else {
      outcome = simulator_->run_trial(angles, rules_.measurements, rng);
    }
    const Player winner = outcome == Chirality::left ? Player::alice : Player::bob;
    return {outcome, winner, winner == Player::alice ? rules_.stake : -rules_.stake};
  }

 private:
  Engine engine_;
  GameRules rules_;
  std::shared_ptr<ProtocolSimulator> simulator_;
};

inline RoundOutcome play_round(const Strategy& strategy, const GameRules& rules, Engine engine,
                               Philox4x64& rng) {
  return RoundEngine(engine, rules).play(strategy.angles, rng);
}

/// One line of the round ledger export.
struct RoundRecord {
  std::size_t round;
  double alpha;
  double beta;
  int m;
  Chirality outcome;
  Player winner;
  long balance_alice;
};

inline nlohmann::json to_json(const RoundRecord& r) {
  return {{"round", r.round},       {"alpha", r.alpha},
          {"beta", r.beta},         {"m", r.m},
          {"outcome", to_string(r.outcome)}, {"winner", to_string(r.winner)},
          {"balance_A", r.balance_alice}};
}

inline void write_jsonl(std::ostream& os, const std::vector<RoundRecord>& ledger) {
  for (const auto& r : ledger) os << to_json(r).dump() << '\n';
}

/// Runs `rounds` rounds of a fixed strategy, round i on stream split(i) of
/// `seed`. Balances are integers in stake units and always sum to zero.
inline std::vector<RoundRecord> play_match(const Strategy& strategy, const GameRules& rules,
                                           Engine engine, std::size_t rounds, std::uint64_t seed) {
  const RoundEngine runner(engine, rules);
  const Philox4x64 master(seed);
  std::vector<RoundRecord> ledger;
  ledger.reserve(rounds);
  long balance = 0;
  for (std::size_t i = 0; i < rounds; ++i) {
    Philox4x64 rng = master.split(i);
    const RoundOutcome out = runner.play(strategy.angles, rng);
    balance += out.delta_alice;
    ledger.push_back({i + 1, strategy.angles.alpha(), strategy.angles.beta(), rules.measurements,
                      out.outcome, out.winner, balance});
  }
  return ledger;
}

}  // namespace qwalk
