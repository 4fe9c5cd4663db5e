#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/constants.hpp"
#include "qwalk/gcd.hpp"
#include "qwalk/random.hpp"
#include "qwalk/spinor.hpp"

namespace qwalk {

/// Outcome of a joint position-and-chirality measurement.
struct MeasurementRecord {
  Chirality outcome = Chirality::left;
  long site = 0;
  std::uint64_t step = 0;
};

/// Doubly stochastic 2x2 matrix [[p, q], [q, p]].
struct MarkovMatrix {
  double p = markov_p;
  double q = markov_q;

  [[nodiscard]] GcdPair apply(const GcdPair& g) const noexcept {
    return {p * g.left + q * g.right, q * g.left + p * g.right};
  }

  /// Second eigenvalue; the chain approaches (1/2, 1/2) as this to the power m.
  [[nodiscard]] double contraction() const noexcept { return p - q; }
};

inline MarkovMatrix markov_matrix_hadamard() noexcept { return {markov_p, markov_q}; }

/// Chirality distribution after the m-th measurement, starting from the
/// distribution `initial` at the first one:
///   p_m = (1 + (2p - 1)^{m-1}) / 2,  q_m = (1 - (1 - 2q)^{m-1}) / 2.
inline GcdPair chain_distribution(int m, const GcdPair& initial) {
  if (m < 1) throw std::invalid_argument("measurement count must be >= 1");
  const MarkovMatrix chain = markov_matrix_hadamard();
  const double pm = 0.5 * (1.0 + std::pow(2.0 * chain.p - 1.0, m - 1));
  const double qm = 0.5 * (1.0 - std::pow(1.0 - 2.0 * chain.q, m - 1));
  return {pm * initial.left + qm * initial.right, qm * initial.left + pm * initial.right};
}

/// Cumulative table over every (site, chirality) outcome of a state.
/// Sampling draws a uniform u in [0,1) and inverts the CDF.
class OutcomeTable {
 public:
  explicit OutcomeTable(const SpinorField& state) : lo_(state.lo()), time_(state.time()) {
    const auto a = state.upper();
    const auto b = state.lower();
    cumulative_.reserve(2 * a.size());
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      total += std::norm(a[i]);
      cumulative_.push_back(total);
      total += std::norm(b[i]);
      cumulative_.push_back(total);
    }
    if (!(total > 0.0)) throw std::invalid_argument("cannot measure a zero state");
    gcd_ = gcd_of_state(state);
  }

  [[nodiscard]] MeasurementRecord sample(double u) const {
    const double target = u * cumulative_.back();
    // upper_bound never lands on a zero-probability slot.
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) it = std::prev(cumulative_.end());
    const auto index = static_cast<std::size_t>(it - cumulative_.begin());
    return {index % 2 == 0 ? Chirality::left : Chirality::right,
            lo_ + static_cast<long>(index / 2), time_};
  }

  [[nodiscard]] const GcdPair& gcd() const noexcept { return gcd_; }

 private:
  long lo_;
  std::uint64_t time_;
  std::vector<double> cumulative_;
  GcdPair gcd_;
};

/// Projective measurement of position and sigma_z chirality. Returns the
/// record and the collapsed state, re-centred at the origin with its time
/// counter reset to 0.
inline std::pair<MeasurementRecord, SpinorField> measure_and_collapse(const SpinorField& state,
                                                                      Philox4x64& rng) {
  const MeasurementRecord record = OutcomeTable(state).sample(rng.uniform());
  return {record, basis_state(record.outcome)};
}

/// One measurement event of the periodic protocol.
struct ProtocolEvent {
  std::size_t trial = 0;
  int epoch = 0;
  Chirality outcome = Chirality::left;
  long site = 0;
};

inline nlohmann::json to_json(const ProtocolEvent& e) {
  return {{"trial", e.trial}, {"epoch", e.epoch}, {"outcome", to_string(e.outcome)}, {"site", e.site}};
}

struct ProtocolResult {
  GcdPair empirical{0.0, 0.0};
  std::size_t final_left = 0;
  std::size_t final_right = 0;
  std::vector<ProtocolEvent> ledger;
};

/// JSON lines, one measurement event per line.
inline void write_jsonl(std::ostream& os, const std::vector<ProtocolEvent>& ledger) {
  for (const auto& e : ledger) os << to_json(e).dump() << '\n';
}

/// Periodic measurement protocol: T unitary steps, measure, collapse to
/// |c>|0>, repeat m times.
///
/// Every epoch starts from the initial Bloch state or from |L>|0> / |R>|0>,
/// so the evolved outcome distribution of each start state is computed once
/// and cached. Thread-safe.
class ProtocolSimulator {
 public:
  ProtocolSimulator(CoinParams coin, std::size_t epoch_steps) : coin_(coin), steps_(epoch_steps) {
    if (epoch_steps == 0) throw std::invalid_argument("epoch length T must be >= 1");
  }

  [[nodiscard]] std::size_t epoch_steps() const noexcept { return steps_; }
  [[nodiscard]] const CoinParams& coin() const noexcept { return coin_; }

  /// Outcome table of the state reached after T steps from `start`.
  const OutcomeTable& table_for(const BlochAngles& start) {
    const std::lock_guard lock(mutex_);
    const auto key = std::make_pair(start.alpha(), start.beta());
    auto it = tables_.find(key);
    if (it == tables_.end()) {
      auto table =
          std::make_unique<OutcomeTable>(evolve_unitary(init_state(start), coin_, steps_));
      it = tables_.emplace(key, std::move(table)).first;
    }
    return *it->second;
  }

  /// One trial: m epochs. Returns the final outcome; appends events to
  /// `ledger` when given.
  Chirality run_trial(const BlochAngles& angles, int m, Philox4x64& rng, std::size_t trial = 0,
                      std::vector<ProtocolEvent>* ledger = nullptr) {
    if (m < 1) throw std::invalid_argument("measurement count must be >= 1");
    BlochAngles start = angles;
    Chirality outcome = Chirality::left;
    for (int epoch = 1; epoch <= m; ++epoch) {
      const MeasurementRecord record = table_for(start).sample(rng.uniform());
      outcome = record.outcome;
      if (ledger) ledger->push_back({trial, epoch, record.outcome, record.site});
      start = outcome == Chirality::left ? BlochAngles(0.0, 0.0) : BlochAngles(pi / 2.0, 0.0);
    }
    return outcome;
  }

  /// `trials` independent trials; trial i draws from stream split(i) of
  /// `seed`.
  ProtocolResult run(const BlochAngles& angles, int m, std::size_t trials, std::uint64_t seed,
                     bool keep_ledger = true) {
    if (trials == 0) throw std::invalid_argument("trials must be >= 1");
    ProtocolResult result;
    if (keep_ledger) result.ledger.reserve(trials * static_cast<std::size_t>(m));
    const Philox4x64 master(seed);
    for (std::size_t i = 0; i < trials; ++i) {
      Philox4x64 rng = master.split(i);
      const Chirality c = run_trial(angles, m, rng, i, keep_ledger ? &result.ledger : nullptr);
      (c == Chirality::left ? result.final_left : result.final_right) += 1;
    }
    result.empirical = {static_cast<double>(result.final_left) / static_cast<double>(trials),
                        static_cast<double>(result.final_right) / static_cast<double>(trials)};
    return result;
  }

 private:
  CoinParams coin_;
  std::size_t steps_;
  std::mutex mutex_;
  std::map<std::pair<double, double>, std::unique_ptr<OutcomeTable>> tables_;
};

inline ProtocolResult simulate_protocol(const BlochAngles& angles, std::size_t epoch_steps, int m,
                                        std::size_t trials, std::uint64_t seed,
                                        CoinParams coin = CoinParams::hadamard()) {
  ProtocolSimulator simulator(coin, epoch_steps);
  return simulator.run(angles, m, trials, seed);
}

}  // namespace qwalk
