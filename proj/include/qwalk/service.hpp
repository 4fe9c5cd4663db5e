#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/games.hpp"
#include "qwalk/heatmap.hpp"
#include "qwalk/random.hpp"

namespace qwalk {

/// Error surfaced to clients as {code, message} with an HTTP status.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}

  [[nodiscard]] int status() const noexcept { return status_; }
  [[nodiscard]] const std::string& code() const noexcept { return code_; }

  [[nodiscard]] nlohmann::json body() const { return {{"code", code_}, {"message", what()}}; }

 private:
  int status_;
  std::string code_;
};

inline ServiceError validation_error(const std::string& msg) { return {400, "invalid_argument", msg}; }
inline ServiceError conflict_error(const std::string& msg) { return {409, "conflict", msg}; }
inline ServiceError not_found_error(const std::string& msg) { return {404, "not_found", msg}; }

enum class Phase { awaiting_first_choice, awaiting_second_choice, playing, closed };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::awaiting_first_choice: return "awaiting-first-choice";
    case Phase::awaiting_second_choice: return "awaiting-second-choice";
    case Phase::playing: return "playing";
    case Phase::closed: return "closed";
  }
  return "?";
}

struct SessionConfig {
  GameRules rules;
  Player first_mover = Player::alice;
  Engine engine = Engine::closed_form;
  std::uint64_t seed = 1;
  /// When false, a pending choice is hidden from the other player until
  /// both are in.
  bool reveal_choices = false;
};

/// Number of points in the advisory slice sent back after a choice.
inline constexpr std::size_t advisory_points = 65;

namespace detail {

inline Player parse_player(const nlohmann::json& v) {
  if (!v.is_string()) throw validation_error("player must be \"alice\" or \"bob\"");
  const auto s = v.get<std::string>();
  if (s == "alice") return Player::alice;
  if (s == "bob") return Player::bob;
  throw validation_error("player must be \"alice\" or \"bob\"");
}

template <class T>
T field_or(const nlohmann::json& body, const char* key, T fallback) {
  if (!body.contains(key)) return fallback;
  try {
    return body.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw validation_error(std::string("field '") + key + "' has the wrong type");
  }
}

inline SessionConfig parse_session_config(const nlohmann::json& body) {
  if (!body.is_object()) throw validation_error("request body must be a JSON object");
  SessionConfig cfg;
  cfg.rules.measurements = field_or<int>(body, "m", 1);
  const auto steps = field_or<long long>(body, "T", 2000);
  if (steps < 1) throw validation_error("epoch length T must be >= 1");
  cfg.rules.epoch_steps = static_cast<std::size_t>(steps);
  cfg.rules.stake = field_or<long>(body, "stake", 1);
  const auto picks = field_or<std::string>(body, "alice_picks", "alpha");
  if (picks == "alpha") {
    cfg.rules.alice_picks = AngleRole::alpha;
  } else if (picks == "beta") {
    cfg.rules.alice_picks = AngleRole::beta;
  } else {
    throw validation_error("alice_picks must be \"alpha\" or \"beta\"");
  }
  if (body.contains("first_mover")) cfg.first_mover = parse_player(body.at("first_mover"));
  const auto engine = field_or<std::string>(body, "engine", "closed-form");
  if (engine == "closed-form") {
    cfg.engine = Engine::closed_form;
  } else if (engine == "full-simulation") {
    cfg.engine = Engine::full_simulation;
  } else {
    throw validation_error("engine must be \"closed-form\" or \"full-simulation\"");
  }
  cfg.seed = field_or<std::uint64_t>(body, "seed", 1);
  cfg.reveal_choices = field_or<bool>(body, "reveal_choices", false);
  try {
    cfg.rules.validate();
  } catch (const std::invalid_argument& e) {
    throw validation_error(e.what());
  }
  return cfg;
}

}  // namespace detail

/// One game between Alice and Bob. Not thread-safe on its own; GameService
/// serializes access per session.
class GameSession {
 public:
  GameSession(std::string id, SessionConfig config)
      : id_(std::move(id)), config_(config), engine_(config.engine, config.rules) {}

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] Phase phase() const noexcept { return phase_; }
  [[nodiscard]] const SessionConfig& config() const noexcept { return config_; }
  [[nodiscard]] const std::vector<RoundRecord>& ledger() const noexcept { return ledger_; }
  [[nodiscard]] long balance(Player p) const noexcept {
    return p == Player::alice ? balance_alice_ : -balance_alice_;
  }

  [[nodiscard]] std::optional<Player> player_to_move() const noexcept {
    if (phase_ == Phase::awaiting_first_choice) return config_.first_mover;
    if (phase_ == Phase::awaiting_second_choice) return other(config_.first_mover);
    return std::nullopt;
  }

  nlohmann::json submit_choice(Player player, double value) {
    const auto expected = player_to_move();
    if (!expected) throw conflict_error(std::string("no choice expected in phase ") + to_string(phase_));
    if (*expected != player) {
      throw conflict_error(std::string("it is ") + to_string(*expected) + "'s turn to choose");
    }
    const AngleRole role = config_.rules.role_of(player);
    const double upper = role == AngleRole::alpha ? pi : 2.0 * pi;
    if (!(value >= 0.0 && value <= upper)) {
      throw validation_error(std::string(to_string(role)) + " out of range");
    }
    (role == AngleRole::alpha ? alpha_ : beta_) = value;
    phase_ = phase_ == Phase::awaiting_first_choice ? Phase::awaiting_second_choice : Phase::playing;
    return {{"phase", to_string(phase_)}, {"advisory", advisory()}};
  }

  nlohmann::json play_rounds(std::size_t n) {
    if (phase_ != Phase::playing) {
      throw conflict_error(std::string("cannot play rounds in phase ") + to_string(phase_));
    }
    if (n == 0 || n > max_rounds_per_request) {
      throw validation_error("rounds must be between 1 and " + std::to_string(max_rounds_per_request));
    }
    const BlochAngles angles(*alpha_, *beta_);
    const Philox4x64 master(config_.seed);
    nlohmann::json rounds = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
      Philox4x64 rng = master.split(ledger_.size());
      const RoundOutcome out = engine_.play(angles, rng);
      balance_alice_ += out.delta_alice;
      ledger_.push_back({ledger_.size() + 1, angles.alpha(), angles.beta(),
                         config_.rules.measurements, out.outcome, out.winner, balance_alice_});
      rounds.push_back(to_json(ledger_.back()));
    }
    return {{"rounds", std::move(rounds)}, {"balances", balances_json()}};
  }

  void close() {
    if (phase_ == Phase::closed) throw conflict_error("session already closed");
    phase_ = Phase::closed;
  }

  /// Snapshot as seen by `viewer` (nullopt: a spectator, who sees no
  /// pending choice).
  [[nodiscard]] nlohmann::json snapshot(std::optional<Player> viewer, std::size_t tail = 20) const {
    const bool both_in = alpha_.has_value() && beta_.has_value();
    auto choice_json = [&](AngleRole role) -> nlohmann::json {
      const auto& value = role == AngleRole::alpha ? alpha_ : beta_;
      if (!value) return nullptr;
      const Player owner = config_.rules.role_of(Player::alice) == role ? Player::alice : Player::bob;
      if (both_in || config_.reveal_choices || viewer == owner) return *value;
      return "hidden";
    };
    nlohmann::json tail_json = nlohmann::json::array();
    const std::size_t start = ledger_.size() > tail ? ledger_.size() - tail : 0;
    for (std::size_t i = start; i < ledger_.size(); ++i) tail_json.push_back(to_json(ledger_[i]));
    const auto to_move = player_to_move();
    const std::string m = std::to_string(config_.rules.measurements);
    return {{"id", id_},
            {"phase", to_string(phase_)},
            {"rules",
             {{"m", config_.rules.measurements},
              {"T", config_.rules.epoch_steps},
              {"stake", config_.rules.stake},
              {"alice_picks", to_string(config_.rules.alice_picks)}}},
            {"first_mover", to_string(config_.first_mover)},
            {"to_move", to_move ? nlohmann::json(to_string(*to_move)) : nlohmann::json(nullptr)},
            {"engine", to_string(config_.engine)},
            {"seed", config_.seed},
            {"reveal_choices", config_.reveal_choices},
            {"choices", {{"alpha", choice_json(AngleRole::alpha)}, {"beta", choice_json(AngleRole::beta)}}},
            {"rounds_played", ledger_.size()},
            {"ledger_tail", std::move(tail_json)},
            {"balances", balances_json()},
            {"heatmaps",
             {{"alice", "/v1/heatmap?which=sigma-a&m=" + m},
              {"bob", "/v1/heatmap?which=sigma-b&m=" + m}}}};
  }

  static constexpr std::size_t max_rounds_per_request = 100000;

 private:
  [[nodiscard]] nlohmann::json balances_json() const {
    return {{"alice", balance_alice_}, {"bob", -balance_alice_}};
  }

  /// Win densities along the still-free angle given the choices so far, or
  /// the point value once both are in.
  [[nodiscard]] nlohmann::json advisory() const {
    const int m = config_.rules.measurements;
    if (alpha_ && beta_) {
      const WinDensity w = win_density(BlochAngles(*alpha_, *beta_), m);
      return {{"alpha", *alpha_}, {"beta", *beta_}, {"sigma_a", w.alice}, {"sigma_b", w.bob}};
    }
    const bool alpha_fixed = alpha_.has_value();
    const double fixed = alpha_fixed ? *alpha_ : *beta_;
    const double span = alpha_fixed ? 2.0 * pi : pi;
    nlohmann::json points = nlohmann::json::array();
    double min_a = 1.0, max_a = 0.0, min_b = 1.0, max_b = 0.0;
    for (std::size_t i = 0; i < advisory_points; ++i) {
      const double x = i + 1 == advisory_points
                           ? span
                           : span * static_cast<double>(i) / static_cast<double>(advisory_points - 1);
      const BlochAngles angles = alpha_fixed ? BlochAngles(fixed, x) : BlochAngles(x, fixed);
      const WinDensity w = win_density(angles, m);
      points.push_back({x, w.alice, w.bob});
      min_a = std::min(min_a, w.alice);
      max_a = std::max(max_a, w.alice);
      min_b = std::min(min_b, w.bob);
      max_b = std::max(max_b, w.bob);
    }
    return {{alpha_fixed ? "alpha" : "beta", fixed},
            {"free", alpha_fixed ? "beta" : "alpha"},
            {"columns", {alpha_fixed ? "beta" : "alpha", "sigma_a", "sigma_b"}},
            {"points", std::move(points)},
            {"min_sigma_a", min_a},
            {"max_sigma_a", max_a},
            {"min_sigma_b", min_b},
            {"max_sigma_b", max_b}};
  }

  std::string id_;
  SessionConfig config_;
  RoundEngine engine_;
  Phase phase_ = Phase::awaiting_first_choice;
  std::optional<double> alpha_;
  std::optional<double> beta_;
  std::vector<RoundRecord> ledger_;
  long balance_alice_ = 0;
};

/// Response of a service call: HTTP status, body and content type.
struct ServiceResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// In-memory session store. Mutating calls can be appended to a JSON-lines
/// journal and replayed later to rebuild identical sessions.
class GameService {
 public:
  explicit GameService(std::uint64_t id_seed = 0, std::optional<std::string> journal_path = {})
      : id_seed_(id_seed) {
    if (journal_path) {
      journal_.open(*journal_path, std::ios::app);
      if (!journal_) throw std::runtime_error("cannot open journal " + *journal_path);
    }
  }

  /// Re-applies every request recorded in a journal.
  static std::unique_ptr<GameService> replay(const std::string& journal_path, std::uint64_t id_seed = 0) {
    auto service = std::make_unique<GameService>(id_seed);
    std::ifstream in(journal_path);
    if (!in) throw std::runtime_error("cannot read journal " + journal_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto entry = nlohmann::json::parse(line);
      const auto op = entry.at("op").get<std::string>();
      const auto& body = entry.at("body");
      try {
        if (op == "create") {
          service->create_session(body);
        } else if (op == "choice") {
          service->submit_choice(entry.at("id").get<std::string>(), body);
        } else if (op == "rounds") {
          service->play_rounds(entry.at("id").get<std::string>(), body);
        } else if (op == "close") {
          service->close_session(entry.at("id").get<std::string>());
        }
      } catch (const ServiceError&) {
        // Rejected requests were rejected the first time too.
      }
    }
    return service;
  }

  nlohmann::json create_session(const nlohmann::json& body) {
    const SessionConfig cfg = detail::parse_session_config(body);
    std::unique_lock lock(sessions_mutex_);
    const std::string id = next_id();
    auto entry = std::make_shared<Entry>(id, cfg);
    sessions_.emplace(id, entry);
    record("create", "", body);
    lock.unlock();
    const std::lock_guard session_lock(entry->mutex);
    return entry->session.snapshot(std::nullopt);
  }

  nlohmann::json submit_choice(const std::string& id, const nlohmann::json& body) {
    if (!body.is_object() || !body.contains("player") || !body.contains("value")) {
      throw validation_error("choice needs \"player\" and \"value\"");
    }
    const Player player = detail::parse_player(body.at("player"));
    if (!body.at("value").is_number()) throw validation_error("value must be a number");
    const double value = body.at("value").get<double>();
    auto entry = find(id);
    const std::lock_guard lock(entry->mutex);
    auto result = entry->session.submit_choice(player, value);
    record("choice", id, body);
    return result;
  }

  nlohmann::json play_rounds(const std::string& id, const nlohmann::json& body) {
    const auto n = detail::field_or<long long>(body.is_object() ? body : nlohmann::json::object(), "n", 1);
    if (n < 1) throw validation_error("n must be >= 1");
    auto entry = find(id);
    const std::lock_guard lock(entry->mutex);
    auto result = entry->session.play_rounds(static_cast<std::size_t>(n));
    record("rounds", id, body);
    return result;
  }

  nlohmann::json close_session(const std::string& id) {
    auto entry = find(id);
    const std::lock_guard lock(entry->mutex);
    entry->session.close();
    record("close", id, nlohmann::json::object());
    return entry->session.snapshot(std::nullopt);
  }

  nlohmann::json get_state(const std::string& id, std::optional<Player> viewer = std::nullopt,
                           std::size_t tail = 20) const {
    auto entry = find(id);
    const std::lock_guard lock(entry->mutex);
    return entry->session.snapshot(viewer, tail);
  }

  /// Analytic strategy maps for the UI. `format` is "csv" or "json".
  static ServiceResponse heatmap(const std::string& which, int m, std::size_t grid,
                                 const std::string& format) {
    HeatmapKind kind;
    try {
      kind = parse_heatmap_kind(which);
    } catch (const std::invalid_argument& e) {
      throw validation_error(e.what());
    }
    if (kind == HeatmapKind::halfline) {
      throw validation_error("the half-line map is a Monte Carlo run; use the CLI");
    }
    if (m < 1) throw validation_error("m must be >= 1");
    if (grid < 2 || grid > 401) throw validation_error("grid must lie in [2, 401]");
    const Heatmap map = compute_heatmap(kind, {grid, m, {}});
    if (format == "csv") {
      std::ostringstream os;
      write_csv(os, map);
      return {200, os.str(), "text/csv"};
    }
    if (format != "json") throw validation_error("format must be csv or json");
    return {200, to_json(map).dump(), "application/json"};
  }

  [[nodiscard]] std::size_t session_count() const {
    const std::shared_lock lock(sessions_mutex_);
    return sessions_.size();
  }

 private:
  struct Entry {
    Entry(const std::string& id, const SessionConfig& cfg) : session(id, cfg) {}
    mutable std::mutex mutex;
    GameSession session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const {
    const std::shared_lock lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw not_found_error("no session '" + id + "'");
    return it->second;
  }

  std::string next_id() {
    const auto words = Philox4x64::block({counter_++, 0, 0, 0}, {id_seed_, 0x53455353ULL});
    std::ostringstream os;
    os << std::hex << words[0];
    return os.str();
  }

  void record(const char* op, const std::string& id, const nlohmann::json& body) {
    if (!journal_.is_open()) return;
    const std::lock_guard lock(journal_mutex_);
    nlohmann::json line = {{"op", op}, {"body", body}};
    if (!id.empty()) line["id"] = id;
    journal_ << line.dump() << '\n' << std::flush;
  }

  std::uint64_t id_seed_;
  std::uint64_t counter_ = 0;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::ofstream journal_;
  std::mutex journal_mutex_;
};

}  // namespace qwalk
