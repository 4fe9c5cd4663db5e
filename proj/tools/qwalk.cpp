// qwalk: command-line front end for the quantum-walk toolkit.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qwalk/qwalk.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_usage = 2;

struct CommonOptions {
  double theta = qwalk::hadamard_theta;
  double alpha = qwalk::pi / 4.0;
  double beta = 0.0;
  std::size_t steps = 2000;
  std::size_t trajectories = 100;
  double r = 0.3;
  int m = 1;
  std::size_t T = 2000;
  std::uint64_t seed = 1;
  std::size_t grid = 201;
  std::string out;
  std::string format = "csv";
  unsigned workers = 0;
  long boundary = qwalk::default_half_line_boundary;
};

/// Writes to --out, or stdout when it is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::invalid_argument("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void check_format(const std::string& format) {
  if (format != "csv" && format != "json") throw std::invalid_argument("--format must be csv or json");
}

qwalk::EnsembleConfig ensemble_config(const CommonOptions& o) {
  qwalk::EnsembleConfig cfg;
  cfg.r = o.r;
  cfg.coin = qwalk::CoinParams(o.theta);
  cfg.angles = qwalk::BlochAngles(o.alpha, o.beta);
  cfg.steps = o.steps;
  cfg.trajectories = o.trajectories;
  cfg.master_seed = o.seed;
  cfg.workers = o.workers;
  cfg.half_line_boundary = o.boundary;
  cfg.validate();
  return cfg;
}

int cmd_heatmap(const std::string& which, const CommonOptions& o) {
  check_format(o.format);
  qwalk::HeatmapParams params;
  params.grid = o.grid;
  params.m = o.m;
  const auto kind = qwalk::parse_heatmap_kind(which);
  if (kind == qwalk::HeatmapKind::halfline) params.ensemble = ensemble_config(o);
  const qwalk::Heatmap map = qwalk::compute_heatmap(kind, params);
  Output out(o.out);
  if (o.format == "json") {
    out.stream() << qwalk::to_json(map).dump() << '\n';
    return exit_ok;
  }
  qwalk::write_csv(out.stream(), map);
  if (!o.out.empty()) {
    std::ofstream sidecar(o.out + ".json");
    sidecar << qwalk::sidecar_json(map).dump(2) << '\n';
  }
  return exit_ok;
}

int cmd_sweep(const std::vector<double>& rs, const CommonOptions& o) {
  check_format(o.format);
  const auto rows = qwalk::halfline_r_sweep(rs, ensemble_config(o));
  Output out(o.out);
  if (o.format == "json") {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& row : rows) {
      doc.push_back({{"r", row.r}, {"Pi_L", row.pi_left}, {"ReQ0", row.re_q0}, {"stderr", row.stderr_pi_left}});
    }
    out.stream() << doc.dump() << '\n';
  } else {
    qwalk::write_sweep_csv(out.stream(), rows);
  }
  return exit_ok;
}

int cmd_ensemble(const std::string& region, const CommonOptions& o) {
  check_format(o.format);
  auto cfg = ensemble_config(o);
  if (region == "full") {
    cfg.region = qwalk::LinkRegion::full_line;
  } else if (region == "half") {
    cfg.region = qwalk::LinkRegion::right_half_line;
  } else if (region == "none") {
    cfg.region = qwalk::LinkRegion::none;
  } else {
    throw std::invalid_argument("--region must be full, half or none");
  }
  const auto res = qwalk::run_ensemble(cfg);
  Output out(o.out);
  if (o.format == "json") {
    out.stream() << nlohmann::json{{"Pi_L", res.pi_left},
                                   {"ReQ0", res.q0.real()},
                                   {"ImQ0", res.q0.imag()},
                                   {"stderr", res.pi_left_stderr}}
                        .dump()
                 << '\n';
  } else {
    qwalk::write_time_series_csv(out.stream(), res);
  }
  return exit_ok;
}

int cmd_walk(const CommonOptions& o) {
  check_format(o.format);
  const auto state = qwalk::evolve_unitary(qwalk::init_state({o.alpha, o.beta}),
                                           qwalk::CoinParams(o.theta), o.steps);
  Output out(o.out);
  if (o.format == "json") {
    out.stream() << qwalk::to_json(state).dump() << '\n';
  } else {
    qwalk::write_csv(out.stream(), state);
  }
  return exit_ok;
}

int cmd_protocol(std::size_t trials, const CommonOptions& o) {
  if (o.m < 1) throw std::invalid_argument("--m must be >= 1");
  if (trials < 1) throw std::invalid_argument("--trials must be >= 1");
  const auto res = qwalk::simulate_protocol({o.alpha, o.beta}, o.T, o.m, trials, o.seed,
                                            qwalk::CoinParams(o.theta));
  Output out(o.out);
  qwalk::write_jsonl(out.stream(), res.ledger);
  std::cerr << nlohmann::json{{"P_L", res.empirical.left}, {"P_R", res.empirical.right}}.dump() << '\n';
  return exit_ok;
}

int cmd_game(std::size_t rounds, const std::string& engine, const CommonOptions& o) {
  qwalk::GameRules rules;
  rules.measurements = o.m;
  rules.epoch_steps = o.T;
  rules.validate();
  qwalk::Engine e;
  if (engine == "closed-form") {
    e = qwalk::Engine::closed_form;
  } else if (engine == "full-simulation") {
    e = qwalk::Engine::full_simulation;
  } else {
    throw std::invalid_argument("--engine must be closed-form or full-simulation");
  }
  const qwalk::Strategy strategy{{o.alpha, o.beta}, rules.alice_picks};
  const auto ledger = qwalk::play_match(strategy, rules, e, rounds, o.seed);
  Output out(o.out);
  qwalk::write_jsonl(out.stream(), ledger);
  return exit_ok;
}

int cmd_verify(const std::string& suite, const CommonOptions& o) {
  const auto report = qwalk::run_verify_suite(suite);
  Output out(o.out);
  out.stream() << qwalk::to_json(report).dump(2) << '\n';
  return report.passed() ? exit_ok : exit_verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-time quantum walk toolkit: chirality dynamics, decoherence and games"};
  app.require_subcommand(1);
  CommonOptions o;

  auto add_walk = [&o](CLI::App* sub) {
    sub->add_option("--theta", o.theta, "coin angle in [0, pi/2]")->capture_default_str();
    sub->add_option("--alpha", o.alpha, "initial Bloch angle alpha in [0, pi]")->capture_default_str();
    sub->add_option("--beta", o.beta, "initial Bloch angle beta in [0, 2 pi]")->capture_default_str();
    sub->add_option("--seed", o.seed, "master seed")->capture_default_str();
    sub->add_option("--out", o.out, "output file (default stdout)");
  };
  auto add_ensemble = [&o](CLI::App* sub) {
    sub->add_option("--steps", o.steps, "time steps")->capture_default_str();
    sub->add_option("--trajectories", o.trajectories, "ensemble size")->capture_default_str();
    sub->add_option("--workers", o.workers, "threads (0 = all cores)");
    sub->add_option("--boundary", o.boundary, "first breakable link in half-line mode")->capture_default_str();
  };

  std::string which;
  auto* heatmap = app.add_subcommand("heatmap", "strategy-plane map: pi-left, pi-right, p2T, halfline, sigma-a, sigma-b");
  heatmap->add_option("which", which)->required();
  heatmap->add_option("--grid", o.grid, "points per axis")->capture_default_str();
  heatmap->add_option("--m", o.m, "measurements (sigma-a, sigma-b)")->capture_default_str();
  heatmap->add_option("--r", o.r, "break probability (halfline)")->capture_default_str();
  heatmap->add_option("--format", o.format, "csv (plus FILE.json sidecar) or json")->capture_default_str();
  add_walk(heatmap);
  add_ensemble(heatmap);

  std::vector<double> rs = {0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95};
  auto* sweep = app.add_subcommand("sweep-r", "half-line Pi_L as a function of r");
  sweep->add_option("--r", rs, "break probabilities")->delimiter(',')->capture_default_str();
  sweep->add_option("--format", o.format)->capture_default_str();
  add_walk(sweep);
  add_ensemble(sweep);

  std::string region = "full";
  auto* ensemble = app.add_subcommand("ensemble", "broken-link ensemble time series");
  ensemble->add_option("--r", o.r, "break probability")->capture_default_str();
  ensemble->add_option("--region", region, "full, half or none")->capture_default_str();
  ensemble->add_option("--format", o.format, "csv time series or json summary")->capture_default_str();
  add_walk(ensemble);
  add_ensemble(ensemble);

  auto* walk = app.add_subcommand("walk", "unitary walk; dumps the final state");
  walk->add_option("--steps", o.steps)->capture_default_str();
  walk->add_option("--format", o.format)->capture_default_str();
  add_walk(walk);

  std::size_t trials = 10000;
  auto* protocol = app.add_subcommand("protocol", "periodic measurement protocol; JSON-lines ledger");
  protocol->add_option("--T", o.T, "steps between measurements")->capture_default_str();
  protocol->add_option("--m", o.m, "measurements")->capture_default_str();
  protocol->add_option("--trials", trials)->capture_default_str();
  add_walk(protocol);

  std::size_t rounds = 100;
  std::string engine = "closed-form";
  auto* game = app.add_subcommand("game", "coin-flipping game rounds; JSON-lines ledger");
  game->add_option("--T", o.T)->capture_default_str();
  game->add_option("--m", o.m)->capture_default_str();
  game->add_option("--rounds", rounds)->capture_default_str();
  game->add_option("--engine", engine, "closed-form or full-simulation")->capture_default_str();
  add_walk(game);

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a verification suite; JSON report");
  verify->add_option("suite", suite, "master-equation, markov-closed-form, channel-invariants, game-fairness")
      ->required();
  verify->add_option("--out", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*heatmap) return cmd_heatmap(which, o);
    if (*sweep) return cmd_sweep(rs, o);
    if (*ensemble) return cmd_ensemble(region, o);
    if (*walk) return cmd_walk(o);
    if (*protocol) return cmd_protocol(trials, o);
    if (*game) return cmd_game(rounds, engine, o);
    if (*verify) return cmd_verify(suite, o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
