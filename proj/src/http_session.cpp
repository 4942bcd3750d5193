#include "credaudit/http_session.hpp"

#include <httplib.h>
#include <iconv.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstring>

#include "credaudit/page_analyzer.hpp"

namespace credaudit {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

bool valid_utf8(const std::string& s) {
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    size_t need = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c >> 5) == 0x6) {
      need = 1;
    } else if ((c >> 4) == 0xE) {
      need = 2;
    } else if ((c >> 3) == 0x1E) {
      need = 3;
    } else {
      return false;
    }
    if (i + need >= s.size()) return false;
    for (size_t k = 1; k <= need; ++k)
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    i += need + 1;
  }
  return true;
}

std::string latin1_to_utf8(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

std::string iconv_to_utf8(const std::string& body, const std::string& charset) {
  iconv_t cd = iconv_open("UTF-8//IGNORE", charset.c_str());
  if (cd == reinterpret_cast<iconv_t>(-1)) return {};
  std::string out;
  std::vector<char> buf(8192);
  const char* in_ptr = body.data();
  size_t in_left = body.size();
  while (in_left > 0) {
    char* src = const_cast<char*>(in_ptr);
    char* dst = buf.data();
    size_t out_left = buf.size();
    size_t rc = iconv(cd, &src, &in_left, &dst, &out_left);
    out.append(buf.data(), buf.size() - out_left);
    in_ptr = src;
    if (rc == static_cast<size_t>(-1)) {
      if (errno == E2BIG) continue;
      if ((errno == EILSEQ || errno == EINVAL) && in_left > 0) {
        ++in_ptr;  // skip the offending byte and keep going
        --in_left;
        continue;
      }
      break;
    }
  }
  iconv_close(cd);
  return out;
}

std::string sniff_meta_charset(const std::string& body) {
  std::string head = lower(body.substr(0, std::min<size_t>(body.size(), 8192)));
  size_t pos = 0;
  while ((pos = head.find("charset", pos)) != std::string::npos) {
    size_t eq = head.find_first_not_of(" \t", pos + 7);
    if (eq == std::string::npos || head[eq] != '=') {
      pos += 7;
      continue;
    }
    size_t start = head.find_first_not_of(" \t\"'", eq + 1);
    if (start == std::string::npos) return {};
    size_t end = start;
    while (end < head.size() &&
           (std::isalnum(static_cast<unsigned char>(head[end])) || head[end] == '-' ||
            head[end] == '_'))
      ++end;
    return head.substr(start, end - start);
  }
  return {};
}

std::string charset_from_content_type(const std::string& content_type) {
  std::string ct = lower(content_type);
  auto pos = ct.find("charset=");
  if (pos == std::string::npos) return {};
  size_t start = ct.find_first_not_of(" \"'", pos + 8);
  if (start == std::string::npos) return {};
  size_t end = start;
  while (end < ct.size() && ct[end] != ';' && ct[end] != ' ' && ct[end] != '"' &&
         ct[end] != '\'')
    ++end;
  return ct.substr(start, end - start);
}

}  // namespace

void SessionConfig::validate() const {
  if (timeout_seconds <= 0) throw std::invalid_argument("timeout must be > 0");
  if (max_redirects < 1) throw std::invalid_argument("max_redirects must be >= 1");
}

const std::vector<std::string>& default_user_agents() {
  static const std::vector<std::string> pool = {
      "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) "
      "Chrome/109.0.0.0 Safari/537.36",
      "Mozilla/5.0 (Windows NT 10.0; Win64; x64; rv:109.0) Gecko/20100101 Firefox/115.0",
      "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_15_7) AppleWebKit/605.1.15 (KHTML, like "
      "Gecko) Version/16.5 Safari/605.1.15",
      "Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 (KHTML, like Gecko) "
      "Chrome/114.0.0.0 Safari/537.36",
      "Mozilla/5.0 (Windows NT 6.1; WOW64) AppleWebKit/537.36 (KHTML, like Gecko) "
      "Chrome/86.0.4240.198 Safari/537.36",
      "Mozilla/5.0 (iPhone; CPU iPhone OS 16_5 like Mac OS X) AppleWebKit/605.1.15 (KHTML, "
      "like Gecko) Version/16.5 Mobile/15E148 Safari/604.1",
      "Mozilla/5.0 (Windows NT 10.0; WOW64; Trident/7.0; rv:11.0) like Gecko",
      "Mozilla/5.0 (Android 13; Mobile; rv:109.0) Gecko/115.0 Firefox/115.0",
  };
  return pool;
}

void CookieJar::store(const Url& request_url, const std::string& set_cookie_line) {
  auto semi = set_cookie_line.find(';');
  std::string pair = trim(set_cookie_line.substr(0, semi));
  auto eq = pair.find('=');
  if (eq == std::string::npos || eq == 0) return;

  Cookie c;
  c.name = trim(pair.substr(0, eq));
  c.value = trim(pair.substr(eq + 1));
  c.domain = request_url.host;
  auto slash = request_url.path.rfind('/');
  c.path = slash == std::string::npos ? "/" : request_url.path.substr(0, slash + 1);

  // attributes
  std::string rest = semi == std::string::npos ? "" : set_cookie_line.substr(semi + 1);
  size_t pos = 0;
  while (pos < rest.size()) {
    auto next = rest.find(';', pos);
    std::string attr = trim(rest.substr(pos, next - pos));
    pos = next == std::string::npos ? rest.size() : next + 1;
    auto aeq = attr.find('=');
    std::string key = lower(aeq == std::string::npos ? attr : attr.substr(0, aeq));
    std::string val = aeq == std::string::npos ? "" : trim(attr.substr(aeq + 1));
    if (key == "path" && !val.empty()) {
      c.path = val;
    } else if (key == "domain" && !val.empty()) {
      if (val[0] == '.') val.erase(0, 1);
      c.domain = lower(val);
      c.host_only = false;
    }
  }

  auto match = std::find_if(cookies_.begin(), cookies_.end(), [&](const Cookie& o) {
    return o.name == c.name && o.domain == c.domain && o.path == c.path;
  });
  if (match != cookies_.end())
    *match = c;
  else
    cookies_.push_back(c);
}

std::string CookieJar::header_for(const Url& url) const {
  std::string out;
  for (const auto& c : cookies_) {
    bool domain_ok = c.host_only
                         ? url.host == c.domain
                         : (url.host == c.domain ||
                            (url.host.size() > c.domain.size() &&
                             url.host.compare(url.host.size() - c.domain.size() - 1,
                                              std::string::npos, "." + c.domain) == 0));
    std::string p = url.path.empty() ? "/" : url.path;
    bool path_ok = p.rfind(c.path, 0) == 0;
    if (domain_ok && path_ok) {
      if (!out.empty()) out += "; ";
      out += c.name + "=" + c.value;
    }
  }
  return out;
}

Session::Session(SessionConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (cfg_.user_agent_pool.empty()) cfg_.user_agent_pool = default_user_agents();
  if (cfg_.seed)
    rng_.seed(*cfg_.seed);
  else
    rng_.seed(std::random_device{}());
}

HeaderSet Session::random_headers() {
  HeaderSet h;
  std::uniform_int_distribution<size_t> ua(0, cfg_.user_agent_pool.size() - 1);
  h.user_agent = cfg_.user_agent_pool[ua(rng_)];
  std::uniform_int_distribution<int> octet(1, 254);
  auto ip = [&]() {
    return std::to_string(octet(rng_)) + "." + std::to_string(octet(rng_)) + "." +
           std::to_string(octet(rng_)) + "." + std::to_string(octet(rng_));
  };
  h.x_forwarded_for = ip();
  h.client_ip = ip();
  return h;
}

ResponsePage Session::pre_request(const std::string& url) { return get(url); }

ResponsePage Session::get(const std::string& url) { return request("GET", url, nullptr); }

ResponsePage Session::submit(const FormDescriptor& form, const ParamList& payload) {
  if (form.method == "GET") {
    std::string url = form.action_url;
    std::string encoded = encode_form(payload);
    if (!encoded.empty())
      url += (url.find('?') == std::string::npos ? "?" : "&") + encoded;
    return request("GET", url, nullptr);
  }
  return request(form.method, form.action_url, &payload);
}

ResponsePage Session::request(const std::string& method, const std::string& url,
                              const ParamList* form_data) {
  auto start = std::chrono::steady_clock::now();
  std::string current = url;
  std::string cur_method = method;
  std::string body = form_data ? encode_form(*form_data) : std::string();
  bool send_body = form_data != nullptr;

  for (int hop = 0; hop <= cfg_.max_redirects; ++hop) {
    auto parsed = parse_url(current);
    if (!parsed) throw transport_error("malformed URL: " + current);

    httplib::Client cli(parsed->origin());
    auto whole = static_cast<time_t>(cfg_.timeout_seconds);
    auto micros = static_cast<time_t>((cfg_.timeout_seconds - whole) * 1e6);
    cli.set_connection_timeout(whole, micros);
    cli.set_read_timeout(whole, micros);
    cli.set_write_timeout(whole, micros);
    cli.set_follow_location(false);

    HeaderSet hs = random_headers();
    httplib::Headers headers = {
        {"User-Agent", hs.user_agent},
        {"X-Forwarded-For", hs.x_forwarded_for},
        {"Client-IP", hs.client_ip},
        {"Accept", "*/*"},
    };
    std::string cookie = jar_.header_for(*parsed);
    if (!cookie.empty()) headers.emplace("Cookie", cookie);

    httplib::Result res =
        (cur_method == "POST" && send_body)
            ? cli.Post(parsed->path_and_query(), headers, body,
                       "application/x-www-form-urlencoded")
            : cli.Get(parsed->path_and_query(), headers);
    if (!res)
      throw transport_error("request to " + current + " failed: " +
                            httplib::to_string(res.error()));

    auto range = res->headers.equal_range("Set-Cookie");
    for (auto it = range.first; it != range.second; ++it) jar_.store(*parsed, it->second);

    if (is_redirect(res->status)) {
      std::string location = res->get_header_value("Location");
      if (!location.empty()) {
        if (hop == cfg_.max_redirects)
          throw redirect_loop_error("too many redirects starting from " + url);
        current = resolve_url(current, location);
        if (res->status != 307 && res->status != 308) {
          cur_method = "GET";
          send_body = false;
        }
        continue;
      }
    }

    ResponsePage page;
    page.status = res->status;
    page.final_url = parsed->to_string();
    page.body = res->body;
    page.body_length = res->body.size();
    std::size_t hdr = 13;  // status line "HTTP/1.1 NNN " + CRLF approximation
    for (const auto& [k, v] : res->headers) hdr += k.size() + 2 + v.size() + 2;
    page.header_bytes = hdr + 2;
    page.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    page.decoded_text = decode_body(page.body, res->get_header_value("Content-Type"));
    return page;
  }
  throw redirect_loop_error("too many redirects starting from " + url);
}

std::string decode_body(const std::string& body, const std::string& content_type_header) {
  std::string charset = charset_from_content_type(content_type_header);
  if (charset.empty()) charset = sniff_meta_charset(body);
  if (!charset.empty() && charset != "utf-8" && charset != "utf8") {
    std::string converted = iconv_to_utf8(body, charset);
    if (!converted.empty() || body.empty()) return converted;
  }
  if (valid_utf8(body)) return body;
  return latin1_to_utf8(body);
}

std::string encode_form(const ParamList& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += '&';
    out += url_encode_component(k);
    out += '=';
    out += url_encode_component(v);
  }
  return out;
}

}  // namespace credaudit
