#include "labflow/core/http_client.hpp"

#include <httplib.h>

#include "labflow/core/errors.hpp"

namespace labflow {

HttpTarget parse_url(std::string_view url) {
  constexpr std::string_view scheme = "http://";
  if (url.substr(0, scheme.size()) != scheme) fail(ErrorCode::kBackend, "unsupported endpoint URL '" + std::string(url) + "'");
  auto slash = url.find('/', scheme.size());
  HttpTarget t;
  t.origin = std::string(url.substr(0, slash));
  t.path = slash == std::string_view::npos ? "/" : std::string(url.substr(slash));
  if (t.origin.size() == scheme.size()) fail(ErrorCode::kBackend, "endpoint URL has no host: '" + std::string(url) + "'");
  return t;
}

std::string post_json(std::string_view url, const Json& body, int timeout_seconds) {
  auto target = parse_url(url);
  // A client per call keeps concurrent callers independent.
  httplib::Client client(target.origin);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_write_timeout(timeout_seconds, 0);
  auto res = client.Post(target.path, body.dump(), "application/json");
  if (!res) {
    fail(ErrorCode::kBackend, "request to " + std::string(url) + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    fail(ErrorCode::kBackend, "request to " + std::string(url) + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

}  // namespace labflow
