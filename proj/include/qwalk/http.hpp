#pragma once

#include <optional>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qwalk/service.hpp"

namespace qwalk {

namespace detail {

inline void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error&) {
    throw validation_error("request body is not valid JSON");
  }
}

/// Runs a handler, mapping library and validation errors to JSON errors.
template <class Handler>
void guarded(httplib::Response& res, Handler&& handler) {
  try {
    handler();
  } catch (const ServiceError& e) {
    send_json(res, e.status(), e.body());
  } catch (const std::invalid_argument& e) {
    send_json(res, 400, {{"code", "invalid_argument"}, {"message", e.what()}});
  } catch (const std::exception& e) {
    send_json(res, 500, {{"code", "internal"}, {"message", e.what()}});
  }
}

inline std::string query_or(const httplib::Request& req, const char* key, std::string fallback) {
  return req.has_param(key) ? req.get_param_value(key) : fallback;
}

inline long long query_int(const httplib::Request& req, const char* key, long long fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    std::size_t used = 0;
    const std::string raw = req.get_param_value(key);
    const long long v = std::stoll(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw validation_error(std::string("query parameter '") + key + "' must be an integer");
  }
}

}  // namespace detail

/// Registers the /v1 game endpoints on `server`.
///
///   POST /v1/sessions                 create a session
///   POST /v1/sessions/{id}/choice     {player, value}
///   POST /v1/sessions/{id}/rounds     {n}
///   POST /v1/sessions/{id}/close
///   GET  /v1/sessions/{id}[?player=alice|bob&tail=N]
///   GET  /v1/heatmap?which=...&m=...&grid=...&format=csv|json
inline void mount_routes(httplib::Server& server, GameService& service) {
  using detail::guarded;
  using detail::send_json;

  server.Post("/v1/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 201, service.create_session(detail::parse_body(req))); });
  });

  server.Post(R"(/v1/sessions/([^/]+)/choice)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  send_json(res, 200, service.submit_choice(req.matches[1], detail::parse_body(req)));
                });
              });

  server.Post(R"(/v1/sessions/([^/]+)/rounds)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  send_json(res, 200, service.play_rounds(req.matches[1], detail::parse_body(req)));
                });
              });

  server.Post(R"(/v1/sessions/([^/]+)/close)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] { send_json(res, 200, service.close_session(req.matches[1])); });
              });

  server.Get(R"(/v1/sessions/([^/]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<Player> viewer;
      if (req.has_param("player")) viewer = detail::parse_player(req.get_param_value("player"));
      const auto tail = detail::query_int(req, "tail", 20);
      if (tail < 0) throw validation_error("tail must be >= 0");
      send_json(res, 200, service.get_state(req.matches[1], viewer, static_cast<std::size_t>(tail)));
    });
  });

  server.Get("/v1/heatmap", [](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto which = detail::query_or(req, "which", "sigma-a");
      const auto m = detail::query_int(req, "m", 1);
      const auto grid = detail::query_int(req, "grid", 101);
      if (grid < 0) throw validation_error("grid must be positive");
      const auto format = detail::query_or(req, "format", "json");
      const ServiceResponse out =
          GameService::heatmap(which, static_cast<int>(m), static_cast<std::size_t>(grid), format);
      res.status = out.status;
      res.set_content(out.body, out.content_type);
    });
  });
}

}  // namespace qwalk
