#ifndef CREDAUDIT_HTTP_SESSION_HPP
#define CREDAUDIT_HTTP_SESSION_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "credaudit/url.hpp"

namespace credaudit {

struct FormDescriptor;

/// Whether response lengths are compared on the body alone or on
/// body plus header bytes. Body is the default: volatile headers (Date,
/// Set-Cookie) would break exact equality between otherwise identical pages.
enum class LengthMode { Body, Total };

struct SessionConfig {
  double timeout_seconds = 10.0;
  int max_redirects = 5;
  std::optional<std::uint64_t> seed;  // header randomization determinism
  std::vector<std::string> user_agent_pool;

  void validate() const;  // throws std::invalid_argument on bad values
};

const std::vector<std::string>& default_user_agents();

struct ResponsePage {
  int status = 0;
  std::string final_url;       // absolute URL after all redirects
  std::string body;            // raw bytes of the final response body
  std::size_t body_length = 0; // == body.size()
  std::size_t header_bytes = 0;
  std::int64_t elapsed_ms = 0; // request start to final body received
  std::string decoded_text;    // best-effort UTF-8 decoding of body
};

inline std::size_t metric_length(const ResponsePage& page, LengthMode mode) {
  return mode == LengthMode::Body ? page.body_length : page.body_length + page.header_bytes;
}

/// Camouflage headers regenerated before every outgoing packet.
struct HeaderSet {
  std::string user_agent;
  std::string x_forwarded_for;  // four dot-separated octets, each in [1,254]
  std::string client_ip;
};

class transport_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class redirect_loop_error : public transport_error {
 public:
  using transport_error::transport_error;
};

struct Cookie {
  std::string name;
  std::string value;
  std::string domain;  // without leading dot
  std::string path;
  bool host_only = true;
};

class CookieJar {
 public:
  void store(const Url& request_url, const std::string& set_cookie_line);
  std::string header_for(const Url& url) const;  // "" when nothing matches
  std::size_t size() const { return cookies_.size(); }
  bool empty() const { return cookies_.empty(); }
  const std::vector<Cookie>& all() const { return cookies_; }

 private:
  std::vector<Cookie> cookies_;
};

using ParamList = std::vector<std::pair<std::string, std::string>>;

/// One HTTP session: persistent cookies, sequential requests, fresh random
/// headers per packet. Never share a session between threads.
class Session {
 public:
  explicit Session(SessionConfig cfg = {});

  /// Initial fetch of the target page; absorbs first-visit cookie issuance so
  /// later length comparisons are clean.
  ResponsePage pre_request(const std::string& url);

  ResponsePage get(const std::string& url);

  /// Sends `payload` to the form's action URL and follows redirects to the
  /// final page. POST bodies are application/x-www-form-urlencoded in the
  /// given parameter order.
  ResponsePage submit(const FormDescriptor& form, const ParamList& payload);

  ResponsePage request(const std::string& method, const std::string& url,
                       const ParamList* form_data);

  HeaderSet random_headers();

  const CookieJar& cookies() const { return jar_; }
  const SessionConfig& config() const { return cfg_; }

 private:
  SessionConfig cfg_;
  CookieJar jar_;
  std::mt19937_64 rng_;
};

/// Charset sniffing (Content-Type header, then meta tag, then permissive
/// fallback) followed by iconv conversion to UTF-8.
std::string decode_body(const std::string& body, const std::string& content_type_header);

std::string encode_form(const ParamList& params);

}  // namespace credaudit

#endif
