#include "credaudit/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <vector>

namespace credaudit {
namespace {

std::string to_lower_ascii(std::string_view value) {
  std::string out(value);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

int default_port(std::string_view scheme) {
  if (scheme == "https") return 443;
  return 80;
}

// RFC 3986 5.2.4
std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string> out;
  bool trailing_slash = false;
  size_t i = 0;
  while (i < path.size()) {
    size_t j = path.find('/', i + (path[i] == '/' ? 1 : 0));
    std::string seg(path.substr(i, (j == std::string_view::npos ? path.size() : j) - i));
    if (!seg.empty() && seg[0] == '/') seg.erase(0, 1);
    i = (j == std::string_view::npos) ? path.size() : j;
    if (seg == ".") {
      trailing_slash = true;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing_slash = true;
    } else {
      out.push_back(seg);
      trailing_slash = false;
    }
    if (i < path.size() && path[i] == '/' && j != std::string_view::npos &&
        j + 1 == path.size()) {
      // lone trailing slash handled below
    }
  }
  std::string result;
  for (const auto& seg : out) {
    result += '/';
    result += seg;
  }
  if (result.empty()) result = "/";
  if ((trailing_slash || (!path.empty() && path.back() == '/')) && result.back() != '/')
    result += '/';
  return result;
}

}  // namespace

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (port != default_port(scheme)) out += ":" + std::to_string(port);
  return out;
}

std::string Url::path_and_query() const {
  std::string out = path.empty() ? "/" : path;
  if (!query.empty()) out += "?" + query;
  return out;
}

std::string Url::to_string() const { return origin() + path_and_query(); }

std::optional<Url> parse_url(std::string_view raw) {
  auto scheme_end = raw.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
  Url u;
  u.scheme = to_lower_ascii(raw.substr(0, scheme_end));
  if (u.scheme != "http" && u.scheme != "https") return std::nullopt;

  std::string_view rest = raw.substr(scheme_end + 3);
  auto frag = rest.find('#');
  if (frag != std::string_view::npos) rest = rest.substr(0, frag);

  auto authority_end = rest.find_first_of("/?");
  std::string_view authority = rest.substr(0, authority_end);
  if (authority.empty()) return std::nullopt;

  std::string_view host_port = authority;
  // (userinfo@ is not supported; login URLs in scope never carry it)
  auto colon = host_port.rfind(':');
  if (colon != std::string_view::npos && host_port.find(']') == std::string_view::npos) {
    std::string_view port_str = host_port.substr(colon + 1);
    int port = 0;
    auto [ptr, ec] = std::from_chars(port_str.data(), port_str.data() + port_str.size(), port);
    if (ec != std::errc() || ptr != port_str.data() + port_str.size() || port <= 0 ||
        port > 65535)
      return std::nullopt;
    u.port = port;
    host_port = host_port.substr(0, colon);
  } else {
    u.port = default_port(u.scheme);
  }
  if (host_port.empty()) return std::nullopt;
  u.host = to_lower_ascii(host_port);

  if (authority_end == std::string_view::npos) {
    u.path = "/";
    return u;
  }
  std::string_view tail = rest.substr(authority_end);
  auto qpos = tail.find('?');
  if (qpos == std::string_view::npos) {
    u.path = std::string(tail);
  } else {
    u.path = std::string(tail.substr(0, qpos));
    u.query = std::string(tail.substr(qpos + 1));
  }
  if (u.path.empty()) u.path = "/";
  return u;
}

bool is_absolute_url(std::string_view raw) { return parse_url(raw).has_value(); }

std::string resolve_url(const std::string& base, const std::string& ref) {
  if (is_absolute_url(ref)) {
    auto u = parse_url(ref);
    return u->to_string();
  }
  auto b = parse_url(base);
  if (!b) return ref;

  std::string r = ref;
  auto frag = r.find('#');
  if (frag != std::string::npos) r = r.substr(0, frag);

  if (r.rfind("//", 0) == 0) {
    auto u = parse_url(b->scheme + ":" + r);
    return u ? u->to_string() : ref;
  }
  if (r.empty()) return b->to_string();

  Url out = *b;
  if (r[0] == '/') {
    auto qpos = r.find('?');
    out.path = remove_dot_segments(qpos == std::string::npos ? r : r.substr(0, qpos));
    out.query = qpos == std::string::npos ? "" : r.substr(qpos + 1);
    return out.to_string();
  }
  if (r[0] == '?') {
    out.query = r.substr(1);
    return out.to_string();
  }
  // relative path: merge with the directory of the base path
  std::string dir = b->path;
  auto slash = dir.rfind('/');
  dir = (slash == std::string::npos) ? "/" : dir.substr(0, slash + 1);
  auto qpos = r.find('?');
  out.path = remove_dot_segments(dir + (qpos == std::string::npos ? r : r.substr(0, qpos)));
  out.query = qpos == std::string::npos ? "" : r.substr(qpos + 1);
  return out.to_string();
}

bool same_url(const std::string& a, const std::string& b) {
  auto ua = parse_url(a);
  auto ub = parse_url(b);
  if (!ua || !ub) return a == b;
  return ua->scheme == ub->scheme && ua->host == ub->host && ua->port == ub->port &&
         ua->path == ub->path && ua->query == ub->query;
}

bool is_ipv4_literal(std::string_view host) {
  int dots = 0;
  int digits = 0;
  int value = 0;
  for (char c : host) {
    if (c == '.') {
      if (digits == 0 || value > 255) return false;
      ++dots;
      digits = 0;
      value = 0;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      ++digits;
      if (digits > 3) return false;
      value = value * 10 + (c - '0');
    } else {
      return false;
    }
  }
  return dots == 3 && digits > 0 && value <= 255;
}

bool is_loopback_host(std::string_view host) {
  std::string h = to_lower_ascii(host);
  if (h == "localhost" || h == "::1" || h == "[::1]") return true;
  if (is_ipv4_literal(h)) return h.rfind("127.", 0) == 0;
  return false;
}

std::string url_encode_component(std::string_view value) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(value.size());
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else if (c == ' ') {
      out += '+';
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

}  // namespace credaudit
