#include "credaudit/simulator.hpp"

#include <httplib.h>
#include <iconv.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

namespace credaudit {
namespace {

constexpr const char* kFreshBanner = "<!-- fresh session -->\n";

std::string utf8_to_charset(const std::string& text, const std::string& charset) {
  iconv_t cd = iconv_open(charset.c_str(), "UTF-8");
  if (cd == reinterpret_cast<iconv_t>(-1)) return text;
  std::string out;
  std::vector<char> buf(4096);
  const char* in_ptr = text.data();
  size_t in_left = text.size();
  while (in_left > 0) {
    char* src = const_cast<char*>(in_ptr);
    char* dst = buf.data();
    size_t out_left = buf.size();
    size_t rc = iconv(cd, &src, &in_left, &dst, &out_left);
    out.append(buf.data(), buf.size() - out_left);
    in_ptr = src;
    if (rc == static_cast<size_t>(-1) && errno != E2BIG) break;
  }
  iconv_close(cd);
  return out;
}

std::string pad_to_bytes(std::string body, std::size_t target) {
  if (target == 0) return body;
  if (body.size() + 9 > target)
    throw std::logic_error("page template longer than its target length");
  std::string filler(target - body.size() - 9, '=');
  body += "<!-- " + filler + " -->";
  return body;
}

std::string content_type_for(const std::string& charset) {
  return "text/html; charset=" + charset;
}

bool port_is_free(int port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return true;  // cannot tell; let the real bind decide
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  bool free_port = ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0;
  ::close(fd);
  return free_port;
}

std::string html_page(const std::string& title, const std::string& body_html) {
  return "<html><head><title>" + title +
         "</title></head>\n<body>\n" + body_html + "\n</body></html>\n";
}

}  // namespace

bool looks_like_injection(const std::string& value) {
  std::string low = ascii_lower(value);
  return low.find("' or") != std::string::npos || low.find("'or") != std::string::npos ||
         low.find("or 1=1") != std::string::npos || low.find("'='") != std::string::npos ||
         low.find(")or(") != std::string::npos;
}

void Scenario::materialize_templates() {
  auto ensure = [&](const std::string& role, std::string html) {
    if (!page_templates.count(role)) page_templates[role] = std::move(html);
  };

  std::string form = "<form method=\"post\" action=\"" + form_action + "\">\n";
  if (!required_token.empty())
    form += "  <input type=\"hidden\" name=\"token\" value=\"" + required_token + "\">\n";
  form += "  <input type=\"text\" name=\"" + user_field + "\">\n";
  form += "  <input type=\"password\" name=\"" + pass_field + "\">\n";
  form += "  <input type=\"submit\" value=\"Login\">\n</form>";

  ensure("login", html_page("管理后台登录", "<h1>后台登录 Login</h1>\n" + form));
  ensure("relogin", html_page("重新登录", "<h1>请重新登录 Login</h1>\n" + form));
  ensure("wrong", html_page("提示信息", "<p>密码错误！请重新输入。</p>"));
  ensure("max_attempts", html_page("提示信息", "<p>错误次数过多，账号已锁定。</p>"));
  ensure("firewall", html_page("拦截提示", "<p>请求已被防火墙拦截。</p>"));
  ensure("success", html_page("提示信息", "<p>登录成功，正在跳转。</p>"));
  ensure("backend", html_page("控制台", "<p>Dashboard</p><p>站点内容概览。</p>"));
  ensure("blocked", html_page("服务提示",
                              "<p>操作过于频繁，请稍候重试 (429)。</p>"));

  auto ensure_len = [&](const std::string& role, std::size_t bytes) {
    if (!target_lengths.count(role)) target_lengths[role] = bytes;
  };
  ensure_len("login", 1200);
  ensure_len("relogin", 1250);
  ensure_len("wrong", 900);
  ensure_len("max_attempts", 950);
  ensure_len("firewall", 1000);
  ensure_len("success", 1100);
  ensure_len("backend", 700);
  ensure_len("blocked", 800);
}

// ---------------------------------------------------------------------------

struct SimServer::Impl {
  Scenario scenario;
  httplib::Server server;
  std::thread worker;
  int port = 0;

  mutable std::mutex mu;
  std::map<std::string, int> failures_by_sid;
  std::uint64_t next_sid = 1;
  std::vector<BlastEvent> served;
  std::mt19937_64 jitter_rng;

  explicit Impl(Scenario sc) : scenario(std::move(sc)), jitter_rng(scenario.jitter_seed) {
    scenario.materialize_templates();
  }

  std::string rendered(const std::string& role, bool fresh_banner) const {
    std::string body = scenario.page_templates.at(role);
    if (scenario.charset != "utf-8") body = utf8_to_charset(body, scenario.charset);
    std::size_t target = scenario.target_lengths.count(role)
                             ? scenario.target_lengths.at(role)
                             : 0;
    body = pad_to_bytes(std::move(body), target);
    if (fresh_banner) body = kFreshBanner + body;
    return body;
  }

  int last_banner_len = 0;

  void finish_body(const httplib::Request& req, httplib::Response& res, std::string body) {
    if (scenario.unstable) {
      int n;
      {
        std::lock_guard<std::mutex> lock(mu);
        std::uniform_int_distribution<int> len(1, 64);
        do {
          n = len(jitter_rng);
        } while (n == last_banner_len);  // consecutive responses must differ
        last_banner_len = n;
      }
      body += "<!-- " + std::string(static_cast<size_t>(n), '~') + " -->";
    }
    (void)req;
    res.set_content(body, content_type_for(scenario.charset));
  }

  std::string session_id(const httplib::Request& req) const {
    std::string cookie = req.get_header_value("Cookie");
    auto pos = cookie.find("sid=");
    if (pos == std::string::npos) return {};
    auto end = cookie.find(';', pos);
    return cookie.substr(pos + 4, end == std::string::npos ? std::string::npos
                                                           : end - pos - 4);
  }

  void apply_jitter() {
    if (scenario.jitter_ms_max <= 0) return;
    double ms;
    {
      std::lock_guard<std::mutex> lock(mu);
      std::uniform_real_distribution<double> dist(0.0, scenario.jitter_ms_max);
      ms = dist(jitter_rng);
    }
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
  }

  void record(BlastEvent e) {
    std::lock_guard<std::mutex> lock(mu);
    served.push_back(e);
  }

  void serve_role(const httplib::Request& req, httplib::Response& res,
                  const std::string& role, bool fresh) {
    finish_body(req, res, rendered(role, fresh));
  }

  // The branch decision for one POST; the chosen presentation is the ground
  // truth appended to `served`.
  void handle_post(const httplib::Request& req, httplib::Response& res) {
    std::string sid = session_id(req);
    bool fresh;
    {
      std::lock_guard<std::mutex> lock(mu);
      fresh = sid.empty() || !failures_by_sid.count(sid);
      if (fresh) {
        sid = scenario.issue_cookies ? "s" + std::to_string(next_sid++) : "";
        failures_by_sid[sid];  // create
        if (scenario.issue_cookies)
          res.set_header("Set-Cookie", "sid=" + sid + "; Path=/");
      }
    }
    bool banner = fresh && scenario.cookie_on_first;

    std::string user = req.get_param_value(scenario.user_field.c_str());
    std::string pass = req.get_param_value(scenario.pass_field.c_str());

    if (scenario.hash_delay_ms_per_char) {
      bool exists =
          std::find(scenario.existing_users.begin(), scenario.existing_users.end(), user) !=
              scenario.existing_users.end() ||
          (scenario.valid_credential && scenario.valid_credential->first == user);
      if (exists) {
        double ms = *scenario.hash_delay_ms_per_char * static_cast<double>(pass.size());
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
      }
    }
    apply_jitter();

    bool locked = false;
    if (scenario.lockout_threshold) {
      std::lock_guard<std::mutex> lock(mu);
      locked = failures_by_sid[sid] >= *scenario.lockout_threshold;
    }
    if (locked) {
      record(scenario.lockout_event);
      switch (scenario.lockout_event) {
        case BlastEvent::E5:
          res.set_redirect("/max_attempts");
          return;
        case BlastEvent::E3:
          serve_role(req, res, "max_attempts", banner);
          return;
        default:
          serve_role(req, res, "blocked", banner);
          return;
      }
    }

    bool token_ok = scenario.required_token.empty() ||
                    req.get_param_value("token") == scenario.required_token;

    bool injected = looks_like_injection(user) || looks_like_injection(pass);
    if (scenario.sqli_vulnerable && injected && token_ok) {
      record(BlastEvent::E9);
      res.set_redirect("/admin");
      return;
    }

    bool valid = token_ok && scenario.valid_credential &&
                 scenario.valid_credential->first == user &&
                 scenario.valid_credential->second == pass;
    if (valid) {
      record(scenario.profile.correct);
      res.set_redirect(scenario.profile.correct == BlastEvent::E8 ? "/success" : "/admin");
      return;
    }

    {
      std::lock_guard<std::mutex> lock(mu);
      failures_by_sid[sid] += 1;
    }
    BlastEvent presentation =
        (injected && scenario.profile.universal == BlastEvent::E6) ? BlastEvent::E6
                                                                   : scenario.profile.wrong;
    record(presentation);
    switch (presentation) {
      case BlastEvent::E1:
        serve_role(req, res, "login", banner);
        return;
      case BlastEvent::E2:
        serve_role(req, res, "wrong", banner);
        return;
      case BlastEvent::E3:
        serve_role(req, res, "max_attempts", banner);
        return;
      case BlastEvent::E4:
        res.set_redirect(banner ? "/wrong_first" : "/wrong");
        return;
      case BlastEvent::E5:
        res.set_redirect("/max_attempts");
        return;
      case BlastEvent::E6:
        res.set_redirect("/firewall");
        return;
      default:  // Other: form re-rendered at a different URL
        res.set_redirect("/relogin");
        return;
    }
  }

  void handle_login_get(const httplib::Request& req, httplib::Response& res) {
    apply_jitter();
    std::string sid = session_id(req);
    bool fresh;
    {
      std::lock_guard<std::mutex> lock(mu);
      fresh = sid.empty() || !failures_by_sid.count(sid);
      if (fresh && scenario.issue_cookies) {
        sid = "s" + std::to_string(next_sid++);
        failures_by_sid[sid];
        res.set_header("Set-Cookie", "sid=" + sid + "; Path=/");
      }
    }
    serve_role(req, res, "login", fresh && scenario.cookie_on_first);
  }
};

SimServer::SimServer(Scenario scenario, int port) : impl_(std::make_unique<Impl>(scenario)) {
  auto& sv = impl_->server;
  auto* impl = impl_.get();

  sv.Get("/login", [impl](const httplib::Request& req, httplib::Response& res) {
    impl->handle_login_get(req, res);
  });
  std::string action_path = "/login";
  if (!impl->scenario.form_action.empty()) {
    std::string resolved =
        resolve_url("http://x/login", impl->scenario.form_action);
    action_path = parse_url(resolved)->path;
  }
  sv.Post(action_path, [impl](const httplib::Request& req, httplib::Response& res) {
    impl->handle_post(req, res);
  });

  auto static_role = [impl](const std::string& role, bool banner = false) {
    return [impl, role, banner](const httplib::Request& req, httplib::Response& res) {
      impl->apply_jitter();
      impl->serve_role(req, res, role, banner);
    };
  };
  sv.Get("/loop", [](const httplib::Request&, httplib::Response& res) {
    res.set_redirect("/loop");
  });
  sv.Get(R"(/chain/(\d+))", [impl](const httplib::Request& req, httplib::Response& res) {
    int depth = std::stoi(req.matches[1]);
    if (depth <= 0)
      impl->serve_role(req, res, "wrong", false);
    else
      res.set_redirect("/chain/" + std::to_string(depth - 1));
  });
  sv.Get("/wrong", static_role("wrong"));
  sv.Get("/wrong_first", static_role("wrong", true));
  sv.Get("/max_attempts", static_role("max_attempts"));
  sv.Get("/firewall", static_role("firewall"));
  sv.Get("/success", static_role("success"));
  sv.Get("/relogin", static_role("relogin"));
  sv.Get("/blocked", static_role("blocked"));
  sv.Get("/admin", static_role("backend"));

  if (port == 0) {
    impl_->port = sv.bind_to_any_port("127.0.0.1");
    if (impl_->port <= 0) throw spawn_error("cannot bind a port for " + scenario.name);
  } else {
    // httplib listeners use SO_REUSEPORT, which would silently share a busy
    // port; probe with a plain socket first so conflicts actually surface
    if (!port_is_free(port))
      throw spawn_error("port " + std::to_string(port) + " is busy");
    if (!sv.bind_to_port("127.0.0.1", port))
      throw spawn_error("port " + std::to_string(port) + " is busy");
    impl_->port = port;
  }
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  sv.wait_until_ready();
}

SimServer::~SimServer() {
  if (impl_) {
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
  }
}

int SimServer::port() const { return impl_->port; }
std::string SimServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}
std::string SimServer::login_url() const { return base_url() + "/login"; }
const Scenario& SimServer::scenario() const { return impl_->scenario; }

std::vector<BlastEvent> SimServer::served_events() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->served;
}

void SimServer::clear_events() {
  std::lock_guard<std::mutex> lock(impl_->mu);
  impl_->served.clear();
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

Scenario base_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  return s;
}

}  // namespace

std::vector<Scenario> scenario_catalog() {
  std::vector<Scenario> all;

  {
    Scenario s = base_scenario("e1_silent_relogin");
    s.profile = {BlastEvent::E1, BlastEvent::E9, BlastEvent::E1};
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("e2_error_original");
    s.profile = {BlastEvent::E2, BlastEvent::E9, BlastEvent::E2};
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("e3_max_attempts_original");
    s.profile = {BlastEvent::E3, BlastEvent::E9, BlastEvent::E3};
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("e4_error_redirect");
    s.profile = {BlastEvent::E4, BlastEvent::E9, BlastEvent::E4};
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("e5_max_attempts_redirect");
    s.profile = {BlastEvent::E5, BlastEvent::E9, BlastEvent::E5};
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("e6_firewall_on_universal");
    s.profile = {BlastEvent::E1, BlastEvent::E9, BlastEvent::E6};
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("e7_redirected_form");
    s.profile = {BlastEvent::Other, BlastEvent::E9, BlastEvent::Other};
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("e8_success_prompt");
    s.profile = {BlastEvent::E2, BlastEvent::E8, BlastEvent::E2};
    s.valid_credential = {{"admin", "admin888"}};
    s.expected_outcome = Outcome::WeakPassword;
    s.expected_credential = s.valid_credential;
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("e9_backend_entry");
    s.profile = {BlastEvent::E1, BlastEvent::E9, BlastEvent::E1};
    s.valid_credential = {{"admin", "admin888"}};
    s.expected_outcome = Outcome::WeakPassword;
    s.expected_credential = s.valid_credential;
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("unstable_banner");
    s.profile = {BlastEvent::E2, BlastEvent::E9, BlastEvent::E2};
    s.unstable = true;
    s.expected_outcome = Outcome::Unstable;
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("cookie_counter");
    s.profile = {BlastEvent::E4, BlastEvent::E9, BlastEvent::E4};
    s.cookie_on_first = true;
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("sqli_vulnerable");
    s.profile = {BlastEvent::E2, BlastEvent::E9, BlastEvent::E2};
    s.sqli_vulnerable = true;
    s.valid_credential = {{"admin", "eaa4a6d7a3ed765985758796f13bd26a"}};
    s.expected_outcome = Outcome::UniversalPassword;
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("timing_side_channel");
    s.profile = {BlastEvent::E2, BlastEvent::E9, BlastEvent::E2};
    s.hash_delay_ms_per_char = 0.5;
    s.existing_users = {"admin"};
    s.planted_user = "admin";
    s.valid_credential = {{"admin", "eaa4a6d7a3ed765985758796f13bd26a"}};
    s.page_templates["wrong"] =
        html_page("提示信息", "<p>Username or password is incorrect.</p>");
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("lockout_equal_length");
    s.profile = {BlastEvent::E2, BlastEvent::E9, BlastEvent::E2};
    s.lockout_threshold = 3;
    s.lockout_event = BlastEvent::Other;  // neutral page: only the recheck catches it
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("dedecms_like");
    s.profile = {BlastEvent::E4, BlastEvent::E8, BlastEvent::E4};
    s.cookie_on_first = true;
    s.valid_credential = {{"admin", "yzddmr6123"}};
    s.expected_outcome = Outcome::WeakPassword;
    s.expected_credential = s.valid_credential;
    s.user_field = "userid";
    s.pass_field = "pwd";
    s.form_action = "dologin.php";
    s.charset = "gb2312";
    s.page_templates["login"] =
        html_page("DedeCMS 管理后台登录",
                  "<h1>用户登录 Login</h1>\n<form method=\"post\" action=\"dologin.php\">\n"
                  "  <input type=\"text\" name=\"userid\">\n"
                  "  <input type=\"password\" name=\"pwd\">\n"
                  "  <input type=\"submit\" value=\"登录\">\n</form>");
    s.page_templates["wrong"] = html_page("DedeCMS提示信息", "<p>密码错误！</p>");
    s.page_templates["success"] =
        html_page("DedeCMS提示信息", "<p>成功登录，正在转向管理主页。</p>");
    s.target_lengths["login"] = 1525;  // +23-byte fresh banner = 1548 on first visit
    s.target_lengths["wrong"] = 1490;
    s.target_lengths["success"] = 1920;
    s.target_lengths["backend"] = 1700;
    all.push_back(s);
  }
  {
    Scenario s = base_scenario("discuz_like");
    s.profile = {BlastEvent::E1, BlastEvent::E9, BlastEvent::E1};
    s.cookie_on_first = true;
    s.valid_credential = {{"admin", "admin888"}};
    s.expected_outcome = Outcome::WeakPassword;
    s.expected_credential = s.valid_credential;
    s.user_field = "admin_username";
    s.pass_field = "admin_password";
    s.target_lengths["login"] = 1400;
    s.target_lengths["backend"] = 1750;
    all.push_back(s);
  }
  auto copy_of = [&all](const std::string& name) -> Scenario {
    for (const auto& s : all)
      if (s.name == name) return s;
    throw std::logic_error("catalog bug: missing base scenario " + name);
  };
  {
    Scenario s = copy_of("dedecms_like");
    s.name = "dedecms_strong";
    s.valid_credential = {{"admin", "eaa4a6d7a3ed765985758796f13bd26a"}};
    s.expected_outcome = Outcome::StrongNoFinding;
    s.expected_credential.reset();
    all.push_back(s);
  }
  {
    Scenario s = copy_of("discuz_like");
    s.name = "discuz_strong";
    s.valid_credential = {{"admin", "eaa4a6d7a3ed765985758796f13bd26a"}};
    s.expected_outcome = Outcome::StrongNoFinding;
    s.expected_credential.reset();
    all.push_back(s);
  }

  for (auto& s : all) s.materialize_templates();
  return all;
}

Scenario scenario_by_name(const std::string& name) {
  for (auto& s : scenario_catalog())
    if (s.name == name) return s;
  throw std::runtime_error("unknown scenario: " + name);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::string event_name(BlastEvent e) { return to_string(e); }

}  // namespace

std::optional<BlastEvent> event_from_string(const std::string& name) {
  if (name == "Other" || name == "other" || name == "E7") return BlastEvent::Other;
  if (name.size() == 2 && name[0] == 'E' && name[1] >= '1' && name[1] <= '9')
    return static_cast<BlastEvent>(name[1] - '0');
  return std::nullopt;
}

std::string scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json doc;
  doc["name"] = s.name;
  doc["profile"] = {{"wrong", event_name(s.profile.wrong)},
                    {"correct", event_name(s.profile.correct)},
                    {"universal", event_name(s.profile.universal)}};
  if (s.valid_credential)
    doc["valid_credential"] = {{"username", s.valid_credential->first},
                               {"password", s.valid_credential->second}};
  if (s.lockout_threshold) doc["lockout_threshold"] = *s.lockout_threshold;
  doc["lockout_event"] = event_name(s.lockout_event);
  doc["sqli_vulnerable"] = s.sqli_vulnerable;
  if (s.hash_delay_ms_per_char) doc["hash_delay_ms_per_char"] = *s.hash_delay_ms_per_char;
  if (!s.existing_users.empty()) doc["existing_users"] = s.existing_users;
  doc["unstable"] = s.unstable;
  doc["cookie_on_first"] = s.cookie_on_first;
  doc["issue_cookies"] = s.issue_cookies;
  doc["user_field"] = s.user_field;
  doc["pass_field"] = s.pass_field;
  if (!s.form_action.empty()) doc["form_action"] = s.form_action;
  if (!s.required_token.empty()) doc["required_token"] = s.required_token;
  doc["charset"] = s.charset;
  if (s.jitter_ms_max > 0) {
    doc["jitter_ms_max"] = s.jitter_ms_max;
    doc["jitter_seed"] = s.jitter_seed;
  }
  if (!s.page_templates.empty()) doc["page_templates"] = s.page_templates;
  if (!s.target_lengths.empty()) doc["target_lengths"] = s.target_lengths;
  doc["expected_outcome"] = to_string(s.expected_outcome);
  if (s.expected_credential)
    doc["expected_credential"] = {{"username", s.expected_credential->first},
                                  {"password", s.expected_credential->second}};
  if (!s.planted_user.empty()) doc["planted_user"] = s.planted_user;
  return doc.dump(2);
}

Scenario scenario_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed scenario JSON: ") + e.what());
  }
  Scenario s;
  s.name = doc.value("name", "custom");
  auto ev = [&](const std::string& name, BlastEvent fallback) {
    auto parsed = event_from_string(name);
    if (!parsed) throw std::runtime_error("bad event name: " + name);
    (void)fallback;
    return *parsed;
  };
  if (doc.contains("profile")) {
    const auto& p = doc.at("profile");
    s.profile.wrong = ev(p.value("wrong", "E1"), BlastEvent::E1);
    s.profile.correct = ev(p.value("correct", "E9"), BlastEvent::E9);
    s.profile.universal = ev(p.value("universal", "E1"), BlastEvent::E1);
  }
  if (doc.contains("valid_credential"))
    s.valid_credential = {{doc.at("valid_credential").at("username").get<std::string>(),
                           doc.at("valid_credential").at("password").get<std::string>()}};
  if (doc.contains("lockout_threshold"))
    s.lockout_threshold = doc.at("lockout_threshold").get<int>();
  if (doc.contains("lockout_event"))
    s.lockout_event = ev(doc.at("lockout_event").get<std::string>(), BlastEvent::E3);
  s.sqli_vulnerable = doc.value("sqli_vulnerable", false);
  if (doc.contains("hash_delay_ms_per_char"))
    s.hash_delay_ms_per_char = doc.at("hash_delay_ms_per_char").get<double>();
  if (doc.contains("existing_users"))
    s.existing_users = doc.at("existing_users").get<std::vector<std::string>>();
  s.unstable = doc.value("unstable", false);
  s.cookie_on_first = doc.value("cookie_on_first", false);
  s.issue_cookies = doc.value("issue_cookies", true);
  s.user_field = doc.value("user_field", "username");
  s.pass_field = doc.value("pass_field", "password");
  s.form_action = doc.value("form_action", "");
  s.required_token = doc.value("required_token", "");
  s.charset = doc.value("charset", "utf-8");
  s.jitter_ms_max = doc.value("jitter_ms_max", 0.0);
  s.jitter_seed = doc.value("jitter_seed", 1);
  if (doc.contains("page_templates"))
    s.page_templates = doc.at("page_templates").get<std::map<std::string, std::string>>();
  if (doc.contains("target_lengths"))
    s.target_lengths = doc.at("target_lengths").get<std::map<std::string, std::size_t>>();
  if (doc.contains("planted_user")) s.planted_user = doc.at("planted_user").get<std::string>();
  s.materialize_templates();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scenario_from_json(text);
}

}  // namespace credaudit
