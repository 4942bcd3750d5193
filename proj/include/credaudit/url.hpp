#ifndef CREDAUDIT_URL_HPP
#define CREDAUDIT_URL_HPP

#include <optional>
#include <string>
#include <string_view>

namespace credaudit {

/// Parsed absolute http(s) URL. Scheme and host are stored lowercase,
/// the port is always resolved (default 80/443 applied).
struct Url {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;   // always starts with '/'
  std::string query;  // without leading '?', empty if none

  std::string origin() const;         // "http://host:port" (port elided when default)
  std::string path_and_query() const; // "/path?query"
  std::string to_string() const;
};

std::optional<Url> parse_url(std::string_view raw);

bool is_absolute_url(std::string_view raw);

/// RFC 3986 reference resolution (fragments dropped, dot segments removed).
/// `base` must be absolute; returns `ref` unchanged when it is absolute itself.
std::string resolve_url(const std::string& base, const std::string& ref);

/// Equality on scheme/host/port/path/query after normalization.
bool same_url(const std::string& a, const std::string& b);

bool is_ipv4_literal(std::string_view host);
bool is_loopback_host(std::string_view host);

std::string url_encode_component(std::string_view value);

}  // namespace credaudit

#endif
