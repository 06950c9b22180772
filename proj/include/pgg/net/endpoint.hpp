#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "pgg/error.hpp"

namespace pgg::net {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

/// "host:port"; port 0 asks the OS for a free port.
inline Endpoint parse_endpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::InvalidArgument, "expected host:port, got '" + std::string(text) + "'");
  }
  Endpoint ep{std::string(text.substr(0, colon)), 0};
  const auto digits = text.substr(colon + 1);
  unsigned port = 0;
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc() || end != digits.data() + digits.size() || digits.empty() || port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "bad port in '" + std::string(text) + "'");
  }
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

}  // namespace pgg::net
