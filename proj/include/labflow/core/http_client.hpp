#pragma once

#include <string>
#include <string_view>

#include "labflow/core/vocabulary.hpp"

namespace labflow {

struct HttpTarget {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

// Only http:// URLs are supported. BackendError when malformed.
HttpTarget parse_url(std::string_view url);

// POSTs `body` as JSON and returns the response text. BackendError when the
// server is unreachable, times out or answers with a non-2xx status.
std::string post_json(std::string_view url, const Json& body, int timeout_seconds);

}  // namespace labflow
