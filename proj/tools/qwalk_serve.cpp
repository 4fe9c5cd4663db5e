// qwalk-serve: JSON-over-HTTP game service (/v1 endpoints, see qwalk/http.hpp).

#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qwalk/http.hpp"
#include "qwalk/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Coin-flipping game service"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string journal;
  std::string replay;
  std::uint64_t id_seed = 0;
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port)->capture_default_str();
  app.add_option("--journal", journal, "append mutating requests to this JSON-lines file");
  app.add_option("--replay", replay, "rebuild sessions from a journal before serving");
  app.add_option("--id-seed", id_seed, "seed for session ids")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::unique_ptr<qwalk::GameService> service;
  try {
    if (!replay.empty()) {
      service = qwalk::GameService::replay(replay, id_seed);
    } else {
      service = std::make_unique<qwalk::GameService>(
          id_seed, journal.empty() ? std::nullopt : std::optional<std::string>(journal));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  httplib::Server server;
  qwalk::mount_routes(server, *service);
  std::cerr << "listening on http://" << host << ':' << port << "/v1\n";
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
    return 1;
  }
  return 0;
}
